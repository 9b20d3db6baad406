"""
URL configuration for denbe_backend project.

The report API lives under /api/; see drr/urls.py.
"""
from django.contrib import admin
from django.urls import include, path

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('drr.urls')),
]
