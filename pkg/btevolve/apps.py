from django.apps import AppConfig


class BTEvolveConfig(AppConfig):

    name = 'btevolve'
    verbose_name = 'Behavior tree evolution'
    default_auto_field = 'django.db.models.AutoField'

    def ready(self):
        from . import receivers  # noqa: F401
