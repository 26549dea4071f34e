"""
Gráficos SVG con reportlab.graphics: mapas de calor para barridos 2-D y
curvas para barridos 1-D y trayectorias.
"""

import logging
import math
from pathlib import Path

from reportlab.graphics import renderSVG
from reportlab.graphics.charts.lineplots import LinePlot
from reportlab.graphics.shapes import Drawing, Rect, String
from reportlab.lib import colors

logger = logging.getLogger(__name__)

WIDTH = 480
HEIGHT = 360
MARGIN = 50
SERIES_COLORS = [colors.darkblue, colors.firebrick, colors.darkgreen, colors.darkorange, colors.purple]


def _color(valor, minimo, maximo, centro=None):
    """Escala azul-blanco-rojo; con centro (ñ = 1) el blanco marca el límite de ion aislado."""
    if valor is None or not math.isfinite(valor):
        return colors.lightgrey
    if centro is None:
        centro = 0.5 * (minimo + maximo)
    if valor <= centro:
        base = minimo if minimo < centro else centro - 1
        return colors.linearlyInterpolatedColor(colors.blue, colors.white, base, centro, max(valor, base))
    tope = maximo if maximo > centro else centro + 1
    return colors.linearlyInterpolatedColor(colors.white, colors.red, centro, tope, min(valor, tope))


def _titulo(dibujo, texto):
    dibujo.add(String(WIDTH / 2, HEIGHT - 20, texto, fontName="Helvetica-Bold", fontSize=12, textAnchor="middle"))


def _rotulos(dibujo, eje_x, eje_y):
    dibujo.add(String(WIDTH / 2, 12, eje_x, fontName="Helvetica", fontSize=10, textAnchor="middle"))
    dibujo.add(String(8, HEIGHT / 2, eje_y, fontName="Helvetica", fontSize=10))


def heatmap_drawing(x_values, y_values, grid, title, x_label, y_label, center=None):
    """grid[i, j] corresponde a (x_values[i], y_values[j])."""
    dibujo = Drawing(WIDTH, HEIGHT)
    _titulo(dibujo, title)
    _rotulos(dibujo, x_label, y_label)
    finitos = [float(v) for fila in grid for v in fila if math.isfinite(v)]
    minimo, maximo = (min(finitos), max(finitos)) if finitos else (0.0, 1.0)
    ancho = (WIDTH - 2 * MARGIN) / len(x_values)
    alto = (HEIGHT - 2 * MARGIN) / len(y_values)
    for i in range(len(x_values)):
        for j in range(len(y_values)):
            dibujo.add(
                Rect(
                    MARGIN + i * ancho,
                    MARGIN + j * alto,
                    ancho,
                    alto,
                    fillColor=_color(float(grid[i][j]), minimo, maximo, center),
                    strokeColor=None,
                )
            )
    dibujo.add(String(MARGIN, MARGIN - 14, f"{x_values[0]:.3g}", fontSize=8))
    dibujo.add(String(WIDTH - MARGIN, MARGIN - 14, f"{x_values[-1]:.3g}", fontSize=8, textAnchor="end"))
    dibujo.add(String(MARGIN - 4, MARGIN, f"{y_values[0]:.3g}", fontSize=8, textAnchor="end"))
    dibujo.add(String(MARGIN - 4, HEIGHT - MARGIN - 8, f"{y_values[-1]:.3g}", fontSize=8, textAnchor="end"))
    dibujo.add(String(WIDTH - MARGIN, HEIGHT - 36, f"[{minimo:.3g}, {maximo:.3g}]", fontSize=8, textAnchor="end"))
    return dibujo


def line_drawing(series, title, x_label, y_label, labels=None):
    """series: lista de listas de pares (x, y); los puntos no finitos se omiten."""
    dibujo = Drawing(WIDTH, HEIGHT)
    _titulo(dibujo, title)
    _rotulos(dibujo, x_label, y_label)
    limpias = [[(float(x), float(y)) for x, y in s if math.isfinite(x) and math.isfinite(y)] for s in series]
    limpias = [s for s in limpias if s]
    if not limpias:
        dibujo.add(String(WIDTH / 2, HEIGHT / 2, "sin datos", fontSize=10, textAnchor="middle"))
        return dibujo
    grafico = LinePlot()
    grafico.x, grafico.y = MARGIN, MARGIN
    grafico.width, grafico.height = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
    grafico.data = limpias
    for k in range(len(limpias)):
        grafico.lines[k].strokeColor = SERIES_COLORS[k % len(SERIES_COLORS)]
        grafico.lines[k].strokeWidth = 1.2
    dibujo.add(grafico)
    for k, etiqueta in enumerate((labels or [])[: len(limpias)]):
        dibujo.add(
            String(
                WIDTH - MARGIN,
                HEIGHT - 36 - 12 * k,
                etiqueta,
                fontSize=8,
                fillColor=SERIES_COLORS[k % len(SERIES_COLORS)],
                textAnchor="end",
            )
        )
    return dibujo


def save_svg(dibujo, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    renderSVG.drawToFile(dibujo, str(path))
    logger.info("SVG escrito en %s", path)
    return path


def write_sweep_svgs(result, out_dir):
    """Un SVG por observable: mapa de calor si hay dos ejes con más de dos puntos, curvas si no."""
    rutas = []
    spec = result.spec
    x = [float(v) for v in result.axis1_values]
    for observable in spec.observables:
        grilla = result.values[observable]
        titulo = f"{spec.name}: {observable}"
        centro = 1.0 if observable.startswith("ntilde") else None
        if spec.axis2 is not None and len(result.axis2_values) > 2:
            dibujo = heatmap_drawing(
                x, [float(v) for v in result.axis2_values], grilla, titulo, spec.axis1.path, spec.axis2.path, centro
            )
        else:
            columnas = result.axis2_values or (None,)
            series = [[(x[a], grilla[a, b]) for a in range(len(x))] for b in range(len(columnas))]
            etiquetas = [f"{spec.axis2.path}={v:.3g}" for v in columnas] if spec.axis2 is not None else None
            dibujo = line_drawing(series, titulo, spec.axis1.path, observable, etiquetas)
        rutas.append(save_svg(dibujo, Path(out_dir) / f"{spec.name}_{observable}.svg"))
    return rutas


def write_trajectory_svg(traj, path):
    series = [list(zip(traj.times, traj.ntilde(i))) for i in range(1, traj.n_ions + 1)]
    etiquetas = [f"ñ_{i}" for i in range(1, traj.n_ions + 1)]
    return save_svg(line_drawing(series, "Evolución de ñ_i(t)", "t (1/ν)", "ñ", etiquetas), path)
