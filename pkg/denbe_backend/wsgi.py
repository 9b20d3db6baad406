"""
WSGI config for denbe_backend project.

Serves the report API, e.g. ``gunicorn denbe_backend.wsgi:application``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'denbe_backend.settings')

application = get_wsgi_application()
