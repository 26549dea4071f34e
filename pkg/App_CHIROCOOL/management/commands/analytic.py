import logging

from django.core.management.base import CommandError

from App_CHIROCOOL.services.analytic import predict

from ._base import USAGE_RETURNCODE, ChirocoolCommand

logger = logging.getLogger(__name__)


class Command(ChirocoolCommand):
    help = (
        "Predicciones cerradas para el ion objetivo (<n1>_st, máximo recíproco, mínimos, beta0, "
        "frontera de enfriamiento superior). Acepta --gamma/--beta o una configuración completa."
    )

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        directos = parser.add_argument_group("parámetros directos (alternativa a --config)")
        directos.add_argument("--gamma", type=float, help="Tasa guiada gamma = gamma_R + gamma_L.")
        directos.add_argument("--beta", type=float, help="Fracción guiada beta = gamma / Gamma.")
        self.add_output_argument(parser)

    def _parametros_directos(self, options):
        gamma = options["gamma"]
        beta = 1.0 if options.get("beta") is None else options["beta"]
        if gamma <= 0 or not 0 < beta <= 1:
            raise CommandError("Se requiere gamma > 0 y 0 < beta <= 1.", returncode=USAGE_RETURNCODE)
        omega = options.get("omega") or [1.0]
        gamma_r = gamma / 2 if options.get("gamma_r") is None else options["gamma_r"]
        return {
            "gamma_r": gamma_r,
            "gamma_l": gamma - gamma_r,
            "gamma_ng": gamma / beta - gamma,
            "eta": 0.04 if options.get("eta") is None else options["eta"],
            "omega": omega[0],
        }

    def handle(self, *args, **options):
        if options.get("gamma") is not None:
            parametros = self._parametros_directos(options)
        else:
            config = self.resolve_config(options)
            ion = config.target
            parametros = {
                "gamma_r": config.gamma_r,
                "gamma_l": config.gamma_l,
                "gamma_ng": config.gamma_ng,
                "eta": config.eta,
                "omega": config.omega[ion - 1],
            }

        def producir(out_dir):
            return {"parameters": parametros, "prediction": predict(**parametros).to_record()}, []

        self.run_registered("analytic", options, parametros, producir)
