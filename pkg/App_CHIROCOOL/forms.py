import logging
import math

from django import forms

from .exceptions import ConfigValidationError
from .services.chain_model import ChainConfig, ConfigIssue, validate_config

logger = logging.getLogger(__name__)

CONFIG_KEYS = (
    "n_ions",
    "eta",
    "omega",
    "gamma_r",
    "gamma_l",
    "gamma_ng",
    "delta",
    "nu",
    "xi",
    "xi_pi",
    "positions",
    "n_max",
    "target",
)


class FloatListField(forms.Field):
    """Lista de reales: acepta una lista JSON o un texto separado por comas ("1.0,0.1")."""

    default_error_messages = {
        "invalid": "Se esperaba una lista de números reales.",
    }

    def to_python(self, value):
        if value in self.empty_values:
            return None
        if isinstance(value, str):
            value = [parte for parte in value.replace(" ", "").split(",") if parte]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise forms.ValidationError(self.error_messages["invalid"], code="invalid")
        try:
            numeros = tuple(float(v) for v in value if not isinstance(v, bool))
        except (TypeError, ValueError):
            raise forms.ValidationError(self.error_messages["invalid"], code="invalid")
        if len(numeros) != len(value) or any(not math.isfinite(v) for v in numeros):
            raise forms.ValidationError(self.error_messages["invalid"], code="invalid")
        return numeros


class ChainConfigForm(forms.Form):
    n_ions = forms.IntegerField(label="Número de iones", min_value=1)
    eta = forms.FloatField(label="Parámetro de Lamb-Dicke")
    omega = FloatListField(label="Frecuencias de Rabi (unidades de ν)")
    gamma_r = forms.FloatField(label="γ_R (unidades de ν)")
    gamma_l = forms.FloatField(label="γ_L (unidades de ν)")
    gamma_ng = forms.FloatField(label="γ_ng (unidades de ν)", required=False)
    delta = forms.FloatField(label="Desintonía Δ", required=False)
    nu = forms.FloatField(label="Frecuencia de trampa ν", required=False)
    xi = forms.FloatField(label="Fase ξ (radianes)", required=False)
    xi_pi = forms.FloatField(label="Fase ξ (múltiplos de π)", required=False)
    positions = FloatListField(label="Fases k_s r_μ explícitas", required=False)
    n_max = forms.IntegerField(label="Truncación fonónica", min_value=1, required=False)
    target = forms.IntegerField(label="Ion objetivo", min_value=1, required=False)

    def clean_eta(self):
        eta = self.cleaned_data.get("eta")
        if eta is not None and eta <= 0:
            raise forms.ValidationError("El parámetro de Lamb-Dicke debe ser > 0.")
        return eta

    def clean_omega(self):
        omega = self.cleaned_data.get("omega")
        if omega and any(o < 0 for o in omega):
            raise forms.ValidationError("Las frecuencias de Rabi deben ser >= 0.")
        return omega

    def clean(self):
        cleaned_data = super().clean()
        xi = cleaned_data.get("xi")
        xi_pi = cleaned_data.get("xi_pi")
        if xi is not None and xi_pi is not None:
            self.add_error("xi_pi", "Indique ξ como 'xi' o como 'xi_pi', no ambos.")
        elif xi_pi is not None:
            cleaned_data["xi"] = math.pi * xi_pi
        elif xi is None:
            cleaned_data["xi"] = 2 * math.pi

        nu = cleaned_data.get("nu")
        cleaned_data["nu"] = 1.0 if nu is None else nu
        if cleaned_data.get("delta") is None:
            # Condición de banda lateral resuelta
            cleaned_data["delta"] = -cleaned_data["nu"]
        if cleaned_data.get("gamma_ng") is None:
            cleaned_data["gamma_ng"] = 0.0
        if cleaned_data.get("n_max") is None:
            cleaned_data["n_max"] = 1
        if cleaned_data.get("target") is None:
            cleaned_data["target"] = 1
        return cleaned_data

    def to_config(self):
        datos = self.cleaned_data
        return ChainConfig(
            n_ions=datos["n_ions"],
            eta=datos["eta"],
            omega=datos["omega"],
            gamma_r=datos["gamma_r"],
            gamma_l=datos["gamma_l"],
            gamma_ng=datos["gamma_ng"],
            delta=datos["delta"],
            nu=datos["nu"],
            xi=datos["xi"],
            positions=datos.get("positions"),
            n_max=datos["n_max"],
            target=datos["target"],
        )


def config_from_mapping(data):
    """
    Valida un dict de configuración (claves de CONFIG_KEYS) y devuelve un ChainConfig.

    Las claves desconocidas, los errores de formulario y las invariantes violadas se
    reportan juntos en un ConfigValidationError con la ruta de cada clave.
    """
    if not isinstance(data, dict):
        raise ConfigValidationError([ConfigIssue("invalid_type", "<raíz>", "Se esperaba un objeto JSON.")])
    desconocidas = sorted(set(data) - set(CONFIG_KEYS))
    if desconocidas:
        raise ConfigValidationError(
            [ConfigIssue("unknown_key", clave, f"Clave desconocida '{clave}'.") for clave in desconocidas]
        )
    form = ChainConfigForm(data=data)
    if not form.is_valid():
        problemas = []
        for campo, errores in form.errors.items():
            for mensaje in errores:
                problemas.append(ConfigIssue("invalid_value", "xi" if campo == "__all__" else campo, mensaje))
        raise ConfigValidationError(problemas)
    config = form.to_config()
    validate_config(config).raise_for_errors()
    return config
