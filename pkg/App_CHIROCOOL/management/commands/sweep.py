import dataclasses
import logging

from django.core.management.base import CommandError

from App_CHIROCOOL.cli import read_json_file
from App_CHIROCOOL.exceptions import ChirocoolError
from App_CHIROCOOL.services.export_services import write_sweep_csv
from App_CHIROCOOL.services.plot_services import write_sweep_svgs
from App_CHIROCOOL.services.sweep import PRESETS, apply_axes, figure_presets, run_grid, sweep_spec_from_dict

from ._base import USAGE_RETURNCODE, ChirocoolCommand

logger = logging.getLogger(__name__)


class Command(ChirocoolCommand):
    help = "Barrido 2-D de parámetros: un preset de figura o un barrido personalizado en JSON."

    def add_arguments(self, parser):
        origen = parser.add_mutually_exclusive_group(required=True)
        origen.add_argument("--preset", choices=sorted(PRESETS), help="Preset de figura.")
        origen.add_argument("--spec", help="Archivo JSON con el barrido personalizado.")
        parser.add_argument("--jobs", type=int, help="Procesos en paralelo (por defecto CHIROCOOL_JOBS o núcleos).")
        parser.add_argument("--n-ions", type=int, help="Reemplaza N de la configuración base.")
        parser.add_argument("--no-svg", action="store_true", help="No escribir gráficos SVG.")
        self.add_output_argument(parser)

    def _spec(self, options):
        try:
            if options.get("preset"):
                spec = figure_presets(options["preset"])
            else:
                spec = sweep_spec_from_dict(read_json_file(options["spec"]))
            if options.get("n_ions") is not None:
                if "n_ions" in {eje.path for eje in spec.axes}:
                    raise CommandError("--n-ions no aplica: el barrido ya recorre n_ions.", returncode=USAGE_RETURNCODE)
                spec = dataclasses.replace(spec, base=apply_axes(spec.base, {"n_ions": options["n_ions"]}))
            return spec.validate()
        except ChirocoolError as error:
            raise self.to_command_error(error)

    def handle(self, *args, **options):
        if options.get("jobs") is not None and options["jobs"] < 1:
            raise CommandError("--jobs debe ser >= 1.", returncode=USAGE_RETURNCODE)
        spec = self._spec(options)

        def producir(out_dir):
            resultado = run_grid(spec, jobs=options.get("jobs"))
            archivos = [write_sweep_csv(resultado, out_dir / f"{spec.name}.csv")]
            if not options["no_svg"]:
                archivos.extend(write_sweep_svgs(resultado, out_dir))
            return resultado.to_record(), archivos

        self.run_registered("sweep", options, spec.to_dict(), producir, spec_hash=spec.spec_hash)
