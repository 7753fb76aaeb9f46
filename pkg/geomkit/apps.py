from django.apps import AppConfig

class GeomkitConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "geomkit"
    verbose_name = "geomkit verification kernel"
