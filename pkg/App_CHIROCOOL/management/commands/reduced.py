import logging
import math

import numpy as np
from django.core.management.base import CommandError

from App_CHIROCOOL.services.export_services import write_reduced_csv
from App_CHIROCOOL.services.plot_services import heatmap_drawing, save_svg
from App_CHIROCOOL.services.reduced_n import MIN_GRID_RESOLUTION, min_search, reduced_scan, solve_reduced

from ._base import USAGE_RETURNCODE, ChirocoolCommand

logger = logging.getLogger(__name__)


class Command(ChirocoolCommand):
    help = (
        "Solver reducido de N iones (un ion objetivo y N-1 refrigerantes en el límite de Omega "
        "refrigerante -> 0, xi múltiplo de 2π): punto único, grilla (beta, gamma_R/gamma) o búsqueda del mínimo."
    )

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        modo = parser.add_mutually_exclusive_group()
        modo.add_argument("--grid", action="store_true", help="Grilla de ñ_1 sobre beta x gamma_R/gamma a Gamma fijo.")
        modo.add_argument("--min-search", action="store_true", help="Mínimo global de ñ_1 sobre (beta, gamma_R/gamma).")
        parser.add_argument(
            "--resolution",
            type=int,
            nargs=2,
            default=[61, 61],
            metavar=("N_BETA", "N_RATIO"),
            help=f"Puntos por eje de la grilla (mínimo {MIN_GRID_RESOLUTION} para --min-search).",
        )
        self.add_output_argument(parser)

    def _overrides(self, options):
        overrides = self.overrides_from_options(options)
        omega = overrides.get("omega")
        n_ions = overrides.get("n_ions")
        # Los refrigerantes del modelo reducido no se excitan: basta con Omega del objetivo.
        if omega is not None and len(omega) == 1 and n_ions and n_ions > 1:
            overrides["omega"] = list(omega) + [0.0] * (n_ions - 1)
        return overrides

    def handle(self, *args, **options):
        config = self.resolve_config(options, self._overrides(options))
        if config.n_ions < 2:
            raise CommandError("El solver reducido requiere --n-ions >= 2.", returncode=USAGE_RETURNCODE)
        vueltas = config.xi / (2 * math.pi)
        if config.positions is not None or abs(vueltas - round(vueltas)) > 1e-9:
            raise CommandError("El solver reducido requiere xi múltiplo de 2π.", returncode=USAGE_RETURNCODE)
        if config.target != 1:
            logger.warning("El solver reducido toma siempre el ion 1 como objetivo (target=%d ignorado).", config.target)
        omega = config.omega[0]
        n_beta, n_ratio = options["resolution"]

        def producir_punto(out_dir):
            solucion = solve_reduced(
                config.n_ions, config.gamma_r, config.gamma_l, config.gamma_ng, config.eta, omega
            )
            return {"config": config.to_dict(), "solution": solucion.to_record()}, []

        def producir_grilla(out_dir):
            betas = np.linspace(0.0, 1.0, n_beta)
            razones = np.linspace(0.0, 1.0, n_ratio)
            argumentos = (config.n_ions, config.total_decay, config.eta, omega, betas, razones)
            n1 = reduced_scan(*argumentos, observable="n1")
            ntilde1 = reduced_scan(*argumentos, observable="ntilde1")
            archivos = [write_reduced_csv(betas, razones, (n1, ntilde1), out_dir / "reduced_grid.csv")]
            dibujo = heatmap_drawing(
                list(betas), list(razones), ntilde1, f"ñ_1, N={config.n_ions}", "beta", "gamma_R/gamma", 1.0
            )
            archivos.append(save_svg(dibujo, out_dir / "reduced_grid_ntilde1.svg"))
            indice = np.unravel_index(np.nanargmin(ntilde1), ntilde1.shape)
            registro = {
                "config": config.to_dict(),
                "grid_minimum": {
                    "beta": float(betas[indice[0]]),
                    "gamma_r_over_gamma": float(razones[indice[1]]),
                    "ntilde1": float(ntilde1[indice]),
                },
            }
            return registro, archivos

        def producir_minimo(out_dir):
            resultado = min_search(config.n_ions, config.total_decay, config.eta, omega, resolution=(n_beta, n_ratio))
            return {"config": config.to_dict(), "min_search": resultado.to_record()}, []

        if options["min_search"]:
            if min(n_beta, n_ratio) < MIN_GRID_RESOLUTION:
                raise CommandError(
                    f"--resolution debe ser al menos {MIN_GRID_RESOLUTION} por eje.", returncode=USAGE_RETURNCODE
                )
            producir = producir_minimo
        elif options["grid"]:
            if min(n_beta, n_ratio) < 2:
                raise CommandError("--resolution debe ser al menos 2 por eje.", returncode=USAGE_RETURNCODE)
            producir = producir_grilla
        else:
            producir = producir_punto
        self.run_registered("reduced", options, config.to_dict(), producir)
