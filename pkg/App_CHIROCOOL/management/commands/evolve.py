import logging

from django.core.management.base import CommandError

from App_CHIROCOOL.exceptions import ChirocoolError, FitFailureError
from App_CHIROCOOL.services.dynamics import evolve, thermal_state
from App_CHIROCOOL.services.plot_services import write_trajectory_svg
from App_CHIROCOOL.services.rate_fit import crossing_time, fit_cooling_rate
from App_CHIROCOOL.services.steady_state import observables, steady_state

from ._base import USAGE_RETURNCODE, ChirocoolCommand

logger = logging.getLogger(__name__)


class Command(ChirocoolCommand):
    help = (
        "Evolución temporal desde un estado térmico producto (todos los iones en |g>), "
        "con ajuste opcional de la tasa de enfriamiento W por ion."
    )

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        parser.add_argument("--n0", type=float, default=0.7, help="Ocupación térmica inicial por ion.")
        parser.add_argument("--t-end", type=float, required=True, help="Tiempo final (1/ν).")
        parser.add_argument("--points", type=int, default=201, help="Puntos de la grilla de salida.")
        parser.add_argument(
            "--fit", action="store_true", help="Ajustar a·exp(-Wt) + <n>_st con <n>_st del solver estacionario."
        )
        parser.add_argument("--no-svg", action="store_true", help="No escribir el gráfico SVG.")
        self.add_output_argument(parser)

    def _ajustes(self, traj, config):
        try:
            ocupaciones = observables(steady_state(config), config).occupations
        except ChirocoolError as error:
            logger.warning("Sin estado estacionario de referencia para el ajuste: %s", error)
            return [{"ion": i, "error": str(error)} for i in range(1, config.n_ions + 1)]
        ajustes = []
        for i in range(1, config.n_ions + 1):
            try:
                ajustes.append(fit_cooling_rate(traj, i, ocupaciones[i - 1]).to_record())
            except FitFailureError as error:
                logger.warning("Ajuste del ion %d fallido: %s", i, error)
                ajustes.append({"ion": i, "error": str(error), "diagnostics": error.diagnostics})
        return ajustes

    def handle(self, *args, **options):
        config = self.resolve_config(options)
        if options["t_end"] <= 0 or options["n0"] < 0 or options["points"] < 2:
            raise CommandError("Se requiere --t-end > 0, --n0 >= 0 y --points >= 2.", returncode=USAGE_RETURNCODE)

        def producir(out_dir):
            rho0 = thermal_state(options["n0"], config.n_max, config.n_ions)
            traj = evolve(config, rho0, options["t_end"], points=options["points"])
            archivos = [traj.to_csv(out_dir / "trajectory.csv")]
            if not options["no_svg"]:
                archivos.append(write_trajectory_svg(traj, out_dir / "trajectory.svg"))
            registro = {
                "config": config.to_dict(),
                "n0": options["n0"],
                "t_end": options["t_end"],
                "steps": traj.steps,
                "max_trace_drift": traj.max_trace_drift,
                "max_hermiticity_drift": traj.max_hermiticity_drift,
                "final": {
                    "n": [float(traj.occupation(i)[-1]) for i in range(1, config.n_ions + 1)],
                    "ntilde": [float(traj.ntilde(i)[-1]) for i in range(1, config.n_ions + 1)],
                },
                "crossing": [crossing_time(traj, i) for i in range(1, config.n_ions + 1)],
            }
            if options["fit"]:
                registro["fits"] = self._ajustes(traj, config)
            return registro, archivos

        self.run_registered("evolve", options, config.to_dict(), producir)
