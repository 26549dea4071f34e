"""
Motor de barridos 2-D sobre parámetros de la cadena y presets que regeneran
los datos de cada figura.

Cada punto de la grilla se evalúa de forma independiente; las fallas se
registran en la celda (estado "error:<Clase>") y nunca abortan el barrido.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..exceptions import ChirocoolError, InvalidSweepSpecError, UnknownPresetError
from ..utils import hash_canonico, numero_de_trabajos
from .chain_model import ChainConfig, validate_config
from .dynamics import evolve, thermal_state
from .rate_fit import crossing_time, fit_cooling_rate
from .reduced_n import min_search, solve_reduced
from .steady_state import observables, steady_state

logger = logging.getLogger(__name__)

FULL_STEADY = "full_steady"
REDUCED = "reduced"
DYNAMICS_FIT = "dynamics_fit"
MIN_SEARCH = "min_search"
SOLVERS = (FULL_STEADY, REDUCED, DYNAMICS_FIT, MIN_SEARCH)

# Orden de aplicación: beta conserva Gamma y gamma_R/gamma conserva gamma.
AXIS_ORDER = ("n_ions", "omega1", "omega2_over_omega1", "xi", "beta", "gamma_r_over_gamma")

OK = "ok"
UNDEFINED = "undefined"

STEADY_GRID = 41
DYNAMICS_GRID = 9

MIN_SEARCH_OBSERVABLES = ("ntilde1_min", "beta_min", "gamma_r_over_gamma_min")


@dataclass(frozen=True)
class SweepAxis:
    path: str
    start: float | None = None
    stop: float | None = None
    points: int | None = None
    values: tuple | None = None

    def __post_init__(self):
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def grid(self):
        if self.values is not None:
            valores = np.asarray(self.values, dtype=float)
        else:
            valores = np.linspace(self.start, self.stop, self.points)
        if self.path == "n_ions":
            return tuple(int(round(v)) for v in valores)
        return tuple(float(v) for v in valores)

    def issues(self):
        errores = []
        if self.path not in AXIS_ORDER:
            return [f"Eje desconocido '{self.path}' (válidos: {', '.join(AXIS_ORDER)})"]
        if self.values is None:
            if self.start is None or self.stop is None or not self.points:
                return [f"El eje '{self.path}' necesita start/stop/points o values"]
            if self.points < 1:
                errores.append(f"El eje '{self.path}' necesita al menos un punto")
        valores = self.grid() if not errores else ()
        if not valores:
            errores.append(f"El eje '{self.path}' está vacío")
        if self.path in ("beta", "gamma_r_over_gamma") and any(not 0.0 <= v <= 1.0 for v in valores):
            errores.append(f"Los valores de '{self.path}' deben estar en [0, 1]")
        if self.path in ("omega1", "omega2_over_omega1") and any(v < 0 for v in valores):
            errores.append(f"Los valores de '{self.path}' deben ser >= 0")
        if self.path == "n_ions" and any(v < 1 for v in valores):
            errores.append("El número de iones debe ser >= 1")
        if self.path == "xi" and any(not math.isfinite(v) for v in valores):
            errores.append("La fase xi debe ser finita")
        return errores

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class SweepSpec:
    name: str
    base: ChainConfig
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    observables: tuple = ("ntilde_1",)
    solver: str = FULL_STEADY
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))

    @property
    def axes(self):
        return tuple(eje for eje in (self.axis1, self.axis2) if eje is not None)

    @property
    def shape(self):
        return tuple(len(eje.grid()) for eje in self.axes)

    def to_dict(self):
        return {
            "name": self.name,
            "base": self.base.to_dict(),
            "axis1": self.axis1.to_dict(),
            "axis2": self.axis2.to_dict() if self.axis2 else None,
            "observables": list(self.observables),
            "solver": self.solver,
            "options": dict(self.options),
        }

    @property
    def spec_hash(self):
        return hash_canonico(self.to_dict())

    def validate(self):
        """Lanza InvalidSweepSpecError con todos los problemas encontrados."""
        errores = []
        if self.solver not in SOLVERS:
            errores.append(f"Solver desconocido '{self.solver}' (válidos: {', '.join(SOLVERS)})")
        for eje in self.axes:
            errores.extend(eje.issues())
        if self.axis2 is not None and self.axis2.path == self.axis1.path:
            errores.append("Los dos ejes no pueden barrer el mismo parámetro")
        reporte = validate_config(self.base)
        errores.extend(f"base.{i.field}: {i.message}" for i in reporte.errors)
        rutas = {eje.path for eje in self.axes}

        for observable in self.observables:
            if not _observable_valido(observable, self.solver):
                errores.append(f"Observable '{observable}' no disponible con el solver '{self.solver}'")
        if self.solver == REDUCED:
            if "xi" in rutas or not _multiplo_de_dos_pi(self.base):
                errores.append("El solver reducido requiere xi múltiplo de 2π fijo")
            if self.base.n_ions < 2 and "n_ions" not in rutas:
                errores.append("El solver reducido requiere N >= 2")
        if self.solver == MIN_SEARCH and (self.axis1.path != "n_ions" or self.axis2 is not None):
            errores.append("min_search barre solo el eje n_ions")
        if self.solver == DYNAMICS_FIT:
            for clave in ("n0", "t_end"):
                if clave not in self.options:
                    errores.append(f"dynamics_fit requiere la opción '{clave}'")
        if errores:
            raise InvalidSweepSpecError("; ".join(errores))
        return self


@dataclass
class SweepResult:
    spec: SweepSpec
    axis1_values: tuple
    axis2_values: tuple
    values: dict  # observable -> ndarray (n1, n2); NaN solo donde status != "ok"
    status: dict  # observable -> ndarray de str (n1, n2)
    diagnostics: list = field(default_factory=list, repr=False)
    spec_hash: str = ""
    code_version: str = ""

    @property
    def shape(self):
        return (len(self.axis1_values), max(len(self.axis2_values), 1))

    def grid(self, observable):
        return self.values[observable]

    def failed_points(self):
        fallidos = set()
        for estados in self.status.values():
            for a, b in zip(*np.nonzero(np.char.startswith(estados.astype(str), "error"))):
                fallidos.add((int(a), int(b)))
        return sorted(fallidos)

    def to_rows(self):
        """Filas en formato largo: (axis1, axis2, observable, value, status)."""
        segundos = self.axis2_values or (None,)
        for a, x1 in enumerate(self.axis1_values):
            for b, x2 in enumerate(segundos):
                for observable in self.spec.observables:
                    yield x1, x2, observable, float(self.values[observable][a, b]), str(self.status[observable][a, b])

    def to_record(self):
        return {
            "spec": self.spec.to_dict(),
            "spec_hash": self.spec_hash,
            "code_version": self.code_version,
            "axis1": {"path": self.spec.axis1.path, "values": list(self.axis1_values)},
            "axis2": (
                {"path": self.spec.axis2.path, "values": list(self.axis2_values)} if self.spec.axis2 else None
            ),
            "failed_points": [list(p) for p in self.failed_points()],
            "diagnostics": self.diagnostics,
        }


def _multiplo_de_dos_pi(config):
    vueltas = config.xi / (2 * math.pi)
    return config.positions is None and abs(vueltas - round(vueltas)) < 1e-9


def _observable_valido(observable, solver):
    if solver == MIN_SEARCH:
        return observable in MIN_SEARCH_OBSERVABLES
    tipo, _, indice = observable.rpartition("_")
    if not indice.isdigit():
        return False
    if solver == FULL_STEADY:
        return tipo in ("n", "ntilde", "excited", "c") and (tipo != "c" or len(indice) == 2)
    if solver == REDUCED:
        return observable in ("n_1", "ntilde_1")
    if solver == DYNAMICS_FIT:
        return tipo in ("W", "crossing", "n_final", "ntilde_final")
    return False


def apply_axes(base, assignment):
    """Aplica {ruta: valor} sobre la configuración base en el orden AXIS_ORDER."""
    config = base
    omega_1 = base.omega[0] if base.omega else 0.0
    proporciones = [o / omega_1 if omega_1 else None for o in base.omega[1:]]
    for ruta in AXIS_ORDER:
        if ruta not in assignment:
            continue
        valor = assignment[ruta]
        if ruta == "n_ions":
            n = int(valor)
            refrigerante = config.omega[1] if len(config.omega) > 1 else 0.0
            omega = (config.omega[0],) + (refrigerante,) * (n - 1)
            config = config.replace(n_ions=n, omega=omega, positions=None, target=min(config.target, n))
            proporciones = [refrigerante / omega[0] if omega[0] else None] * (n - 1)
        elif ruta == "omega1":
            omega = [valor] + [valor * p if p is not None else o for p, o in zip(proporciones, config.omega[1:])]
            config = config.replace(omega=tuple(omega))
        elif ruta == "omega2_over_omega1":
            config = config.replace(omega=(config.omega[0],) + (config.omega[0] * valor,) * (config.n_ions - 1))
        elif ruta == "xi":
            config = config.replace(xi=valor, positions=None)
        elif ruta == "beta":
            total = config.total_decay
            gamma = valor * total
            razon = config.gamma_r / config.gamma if config.gamma > 0 else 0.5
            config = config.replace(gamma_r=razon * gamma, gamma_l=(1 - razon) * gamma, gamma_ng=total - gamma)
        elif ruta == "gamma_r_over_gamma":
            gamma = config.gamma
            config = config.replace(gamma_r=valor * gamma, gamma_l=(1 - valor) * gamma)
    return config


def _evaluar_steady(config, observables_):
    rho = steady_state(config)
    obs = observables(rho, config)
    valores = {}
    for observable in observables_:
        tipo, _, indice = observable.rpartition("_")
        if tipo == "c":
            valores[observable] = float(np.real(obs.correlation(int(indice[0]), int(indice[1]))))
        elif tipo == "n":
            valores[observable] = obs.occupations[int(indice) - 1]
        elif tipo == "ntilde":
            valores[observable] = obs.normalized[int(indice) - 1]
        elif tipo == "excited":
            valores[observable] = obs.excited[int(indice) - 1]
    return valores, {"residual": obs.residual}


def _evaluar_reducido(config, observables_):
    solucion = solve_reduced(config.n_ions, config.gamma_r, config.gamma_l, config.gamma_ng, config.eta, config.omega[0])
    valores = {"n_1": solucion.n1, "ntilde_1": solucion.ntilde1}
    return {o: valores[o] for o in observables_}, {"condition": solucion.condition}


def _evaluar_dinamica(config, observables_, options):
    rho0 = thermal_state(options["n0"], config.n_max, config.n_ions)
    trayectoria = evolve(config, rho0, options["t_end"], points=options.get("points", 401))
    estacionario = observables(steady_state(config), config)
    valores = {}
    diagnostico = {"steps": trayectoria.steps, "trace_drift": trayectoria.max_trace_drift}
    for observable in observables_:
        tipo, _, indice = observable.rpartition("_")
        ion = int(indice)
        if tipo == "W":
            ajuste = fit_cooling_rate(trayectoria, ion, estacionario.occupations[ion - 1])
            valores[observable] = ajuste.rate
            diagnostico[f"fit_residual_{ion}"] = ajuste.residual
        elif tipo == "crossing":
            valores[observable] = crossing_time(trayectoria, ion)
        elif tipo == "n_final":
            valores[observable] = float(trayectoria.occupation(ion)[-1])
        elif tipo == "ntilde_final":
            valores[observable] = float(trayectoria.ntilde(ion)[-1])
    return valores, diagnostico


def _evaluar_min_search(config, observables_, options):
    resolucion = tuple(options.get("resolution", (61, 61)))
    resultado = min_search(config.n_ions, config.total_decay, config.eta, config.omega[0], resolution=resolucion)
    valores = {
        "ntilde1_min": resultado.ntilde1_min,
        "beta_min": resultado.beta,
        "gamma_r_over_gamma_min": resultado.gamma_r_over_gamma,
    }
    return {o: valores[o] for o in observables_}, {"grid_ntilde1": resultado.grid_ntilde1}


def evaluate_point(spec, assignment):
    """
    Evalúa un punto y devuelve (valores, estados, diagnóstico).

    Un valor None (p. ej. sin cruce o normalización indefinida) se reporta como
    NaN con estado "undefined"; una excepción marca todas las celdas del punto.
    """
    config = apply_axes(spec.base, assignment)
    try:
        if spec.solver == FULL_STEADY:
            valores, diagnostico = _evaluar_steady(config, spec.observables)
        elif spec.solver == REDUCED:
            valores, diagnostico = _evaluar_reducido(config, spec.observables)
        elif spec.solver == DYNAMICS_FIT:
            valores, diagnostico = _evaluar_dinamica(config, spec.observables, spec.options)
        else:
            valores, diagnostico = _evaluar_min_search(config, spec.observables, spec.options)
    except (ChirocoolError, ArithmeticError, LookupError, ValueError, RuntimeError, np.linalg.LinAlgError) as error:
        logger.exception("Falló el punto %s", assignment)
        estado = f"error:{type(error).__name__}"
        return (
            {o: math.nan for o in spec.observables},
            {o: estado for o in spec.observables},
            {"error": str(error)},
        )
    estados = {}
    salida = {}
    for observable in spec.observables:
        valor = valores.get(observable)
        if valor is None or not math.isfinite(valor):
            salida[observable], estados[observable] = math.nan, UNDEFINED
        else:
            salida[observable], estados[observable] = float(valor), OK
    return salida, estados, diagnostico


def _tarea(argumentos):
    spec, assignment = argumentos
    return evaluate_point(spec, assignment)


def _inicializar_worker():
    import django
    from django.apps import apps

    if os.environ.get("DJANGO_SETTINGS_MODULE") and not apps.ready:
        django.setup()


def run_grid(spec, jobs=None):
    """
    Evalúa todos los puntos; el resultado no depende de la cantidad de procesos
    (el mapa preserva el orden de la grilla).
    """
    from .. import __version__

    spec.validate()
    valores1 = spec.axis1.grid()
    valores2 = spec.axis2.grid() if spec.axis2 else ()
    tareas = []
    for x1 in valores1:
        for x2 in valores2 or (None,):
            assignment = {spec.axis1.path: x1}
            if spec.axis2 is not None:
                assignment[spec.axis2.path] = x2
            tareas.append((spec, assignment))

    trabajos = min(numero_de_trabajos(jobs), len(tareas))
    logger.info("Barrido '%s': %d puntos, solver %s, %d procesos", spec.name, len(tareas), spec.solver, trabajos)
    if trabajos <= 1:
        resultados = [_tarea(t) for t in tareas]
    else:
        with ProcessPoolExecutor(max_workers=trabajos, initializer=_inicializar_worker) as executor:
            resultados = list(executor.map(_tarea, tareas, chunksize=max(1, len(tareas) // (4 * trabajos))))

    forma = (len(valores1), max(len(valores2), 1))
    valores = {o: np.full(forma, np.nan) for o in spec.observables}
    estados = {o: np.full(forma, UNDEFINED, dtype=object) for o in spec.observables}
    diagnosticos = []
    for k, (salida, estado, diagnostico) in enumerate(resultados):
        a, b = divmod(k, forma[1])
        for observable in spec.observables:
            valores[observable][a, b] = salida[observable]
            estados[observable][a, b] = estado[observable]
        diagnosticos.append({"index": [a, b], **diagnostico})

    resultado = SweepResult(
        spec=spec,
        axis1_values=valores1,
        axis2_values=valores2,
        values=valores,
        status=estados,
        diagnostics=diagnosticos,
        spec_hash=spec.spec_hash,
        code_version=__version__,
    )
    fallidos = resultado.failed_points()
    if fallidos:
        logger.warning("Barrido '%s': %d puntos fallidos", spec.name, len(fallidos))
    return resultado


# --- PRESETS ---

GAMMA = 0.1
ETA = 0.04
TWO_PI = 2 * math.pi


# Estacionario con fonones truncados a n in {0, 1}; la dinámica usa n_max = 4.
def _base_dos_iones(omega_1=1.0, razon=0.1, gamma_r_over_gamma=0.5, n_max=1, xi=TWO_PI):
    return ChainConfig(
        n_ions=2,
        eta=ETA,
        omega=(omega_1, omega_1 * razon),
        gamma_r=gamma_r_over_gamma * GAMMA,
        gamma_l=(1 - gamma_r_over_gamma) * GAMMA,
        gamma_ng=0.0,
        xi=xi,
        n_max=n_max,
    )


def _eje_gamma_r(points=STEADY_GRID):
    return SweepAxis("gamma_r_over_gamma", 0.0, 1.0, points)


def _preset_fig2a():
    return SweepSpec(
        "fig2a",
        _base_dos_iones(),
        _eje_gamma_r(),
        SweepAxis("omega2_over_omega1", 1.0 / STEADY_GRID, 1.0, STEADY_GRID),
        observables=("ntilde_1", "ntilde_2"),
    )


def _preset_fig2b():
    return SweepSpec(
        "fig2b",
        _base_dos_iones(),
        _eje_gamma_r(),
        SweepAxis("omega1", 0.05, 2.0, STEADY_GRID),
        observables=("ntilde_1", "ntilde_2"),
    )


def _preset_fig2c():
    return SweepSpec(
        "fig2c",
        _base_dos_iones(),
        _eje_gamma_r(),
        SweepAxis("xi", 0.0, TWO_PI, STEADY_GRID),
        observables=("ntilde_1", "ntilde_2"),
    )


def _preset_fig_corr_a():
    return SweepSpec(
        "fig_corr_a",
        _base_dos_iones(omega_1=0.2),
        SweepAxis("xi", 0.0, TWO_PI, STEADY_GRID),
        SweepAxis("gamma_r_over_gamma", values=(0.4, 0.5)),
        observables=("c_12", "ntilde_1"),
    )


def _preset_fig_corr_b():
    return SweepSpec(
        "fig_corr_b",
        _base_dos_iones(omega_1=0.5),
        # Omega_2 = 0 desacopla el refrigerante y deja el espacio nulo degenerado
        SweepAxis("omega2_over_omega1", 1.0 / STEADY_GRID, 1.0, STEADY_GRID),
        SweepAxis("gamma_r_over_gamma", values=(0.25, 0.5)),
        observables=("c_12", "ntilde_1"),
    )


DYNAMICS_OPTIONS = {"n0": 0.7, "t_end": 5.0e4, "points": 501}


def _preset_fig3a():
    return SweepSpec(
        "fig3a",
        _base_dos_iones(n_max=4),
        SweepAxis("gamma_r_over_gamma", 0.1, 0.9, DYNAMICS_GRID),
        observables=("W_1", "W_2", "crossing_1"),
        solver=DYNAMICS_FIT,
        options=dict(DYNAMICS_OPTIONS),
    )


def _preset_fig3b():
    return SweepSpec(
        "fig3b",
        _base_dos_iones(n_max=4, gamma_r_over_gamma=0.85),
        SweepAxis("omega1", values=tuple(0.2 * 2 ** (k / 2) for k in range(DYNAMICS_GRID))),
        observables=("W_1", "W_2", "crossing_1"),
        solver=DYNAMICS_FIT,
        options=dict(DYNAMICS_OPTIONS),
    )


def _preset_fig4(n_ions, n_max):
    base = apply_axes(_base_dos_iones(n_max=n_max), {"n_ions": n_ions})
    return SweepSpec(
        f"fig4_n{n_ions}",
        base,
        SweepAxis("beta", 0.0, 1.0, STEADY_GRID),
        _eje_gamma_r(),
        observables=("ntilde_1",),
    )


def _base_multi_ion(n_ions):
    return ChainConfig(
        n_ions=n_ions,
        eta=ETA,
        omega=(1.0,) + (0.0,) * (n_ions - 1),
        gamma_r=0.5 * GAMMA,
        gamma_l=0.5 * GAMMA,
        xi=TWO_PI,
    )


def _preset_fig5a():
    return SweepSpec(
        "fig5a",
        _base_multi_ion(10),
        SweepAxis("beta", 0.0, 1.0, STEADY_GRID),
        _eje_gamma_r(),
        observables=("ntilde_1",),
        solver=REDUCED,
    )


def _preset_fig5b():
    return SweepSpec(
        "fig5b",
        _base_multi_ion(2),
        SweepAxis("n_ions", values=tuple(range(2, 31))),
        observables=MIN_SEARCH_OBSERVABLES,
        solver=MIN_SEARCH,
        options={"resolution": [61, 61]},
    )


PRESETS = {
    "fig2a": _preset_fig2a,
    "fig2b": _preset_fig2b,
    "fig2c": _preset_fig2c,
    "fig_corr_a": _preset_fig_corr_a,
    "fig_corr_b": _preset_fig_corr_b,
    "fig3a": _preset_fig3a,
    "fig3b": _preset_fig3b,
    "fig4_n2": lambda: _preset_fig4(2, 1),
    "fig4_n3": lambda: _preset_fig4(3, 1),
    "fig5a": _preset_fig5a,
    "fig5b": _preset_fig5b,
}


def figure_presets(name):
    """SweepSpec completo con los parámetros de la figura indicada."""
    try:
        return PRESETS[name]()
    except KeyError:
        raise UnknownPresetError(f"Preset desconocido '{name}' (disponibles: {', '.join(PRESETS)})") from None


def _eje_desde_dict(datos, nombre):
    if not isinstance(datos, dict) or "path" not in datos:
        raise InvalidSweepSpecError(f"{nombre}: se esperaba un objeto con 'path'")
    desconocidas = set(datos) - {"path", "start", "stop", "points", "values"}
    if desconocidas:
        raise InvalidSweepSpecError(f"{nombre}: claves desconocidas {sorted(desconocidas)}")
    return SweepAxis(**datos)


def sweep_spec_from_dict(data):
    """Construye y valida un SweepSpec desde un dict (JSON de barrido personalizado)."""
    from ..forms import config_from_mapping

    desconocidas = set(data) - {"name", "base", "axis1", "axis2", "observables", "solver", "options"}
    if desconocidas:
        raise InvalidSweepSpecError(f"Claves desconocidas en el barrido: {sorted(desconocidas)}")
    for clave in ("base", "axis1"):
        if clave not in data:
            raise InvalidSweepSpecError(f"Falta la clave '{clave}' en el barrido")
    spec = SweepSpec(
        name=data.get("name", "custom"),
        base=config_from_mapping(data["base"]),
        axis1=_eje_desde_dict(data["axis1"], "axis1"),
        axis2=_eje_desde_dict(data["axis2"], "axis2") if data.get("axis2") else None,
        observables=tuple(data.get("observables", ("ntilde_1",))),
        solver=data.get("solver", FULL_STEADY),
        options=dict(data.get("options", {})),
    )
    return spec.validate()
