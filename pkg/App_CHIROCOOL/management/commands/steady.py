import logging

from App_CHIROCOOL.services.steady_state import observables, steady_state

from ._base import ChirocoolCommand

logger = logging.getLogger(__name__)


class Command(ChirocoolCommand):
    help = "Estado estacionario completo (espacio nulo del Liouvilliano) y sus observables."

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        self.add_output_argument(parser)

    def handle(self, *args, **options):
        config = self.resolve_config(options)

        def producir(out_dir):
            rho_st = steady_state(config)
            obs = observables(rho_st, config)
            return {"config": config.to_dict(), "observables": obs.to_record()}, []

        self.run_registered("steady", options, config.to_dict(), producir)
