from django.contrib import admin

from drr.models import EvaluationRun, TrialRecord


@admin.register(EvaluationRun)
class EvaluationRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'name', 'manifest', 'variants', 'created_at']


@admin.register(TrialRecord)
class TrialRecordAdmin(admin.ModelAdmin):
    list_display = ['file_id', 'variant', 'snr_db', 'noise_kind', 'status', 'error_db']
    list_filter = ['run', 'variant', 'noise_kind', 'status']
