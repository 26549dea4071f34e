from django.apps import AppConfig


class AppChirocoolConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "App_CHIROCOOL"
    verbose_name = "Enfriamiento quiral de iones atrapados"

    def ready(self):
        import App_CHIROCOOL.signals
