"""
URL routing for the report API.
"""

from django.urls import include, path
from rest_framework.routers import DefaultRouter

from drr.views import EvaluationRunViewSet, TrialRecordViewSet

# DefaultRouter adds the list/detail routes and the @action routes
router = DefaultRouter()
router.register(r'runs', EvaluationRunViewSet)       # /api/runs/
router.register(r'records', TrialRecordViewSet)      # /api/records/

urlpatterns = [
    path('', include(router.urls)),
]
