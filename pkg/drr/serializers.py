"""
Serializers turn estimator results, trial records and summaries into JSON.
The same serializers back the CLI output, the report files and the API, so
every surface shows identical field names and order.
"""

from rest_framework import serializers

from drr.harness.statistics import ErrorSummary
from drr.models import EvaluationRun, TrialRecord

# Deterministic part of a record; timing lives in TimingSerializer
RECORD_FIELDS = [
    'file_id', 'variant', 'snr_db', 'noise_kind', 'status', 'message',
    'estimate_db', 'truth_db', 'error_db',
    'band_centers', 'estimate_bands_db', 'band_valid', 'truth_bands_db', 'error_bands_db',
]
TIMING_FIELDS = ['file_id', 'variant', 'cpu_seconds', 'wall_seconds', 'audio_seconds']


class DrrResultSerializer(serializers.Serializer):
    """
    Read-only view of a DrrResult. Fullband variants leave the band fields
    null.
    """
    variant = serializers.CharField()
    fullband_db = serializers.FloatField()
    per_band_db = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    band_valid = serializers.ListField(child=serializers.BooleanField(), allow_null=True)
    band_centers = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    usable_bins = serializers.IntegerField()


class TrialRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = TrialRecord
        fields = RECORD_FIELDS


class TrialRecordDetailSerializer(serializers.ModelSerializer):
    """Everything about a record, timing included; used by the API."""
    class Meta:
        model = TrialRecord
        fields = ['id', 'run', 'position'] + RECORD_FIELDS + TIMING_FIELDS[2:]


class TimingSerializer(serializers.ModelSerializer):
    class Meta:
        model = TrialRecord
        fields = TIMING_FIELDS


class EvaluationRunSerializer(serializers.ModelSerializer):
    # Number of stored records, handy for the run list
    record_count = serializers.IntegerField(source='records.count', read_only=True)

    class Meta:
        model = EvaluationRun
        fields = ['id', 'name', 'manifest', 'variants', 'seed', 'config', 'created_at',
                  'record_count']


class ErrorSummarySerializer(serializers.Serializer):
    """
    One boxplot condition. ``condition`` maps each grouping key to its
    value, in grouping order.
    """
    condition = serializers.DictField(source='condition_dict')
    count = serializers.IntegerField()
    median = serializers.FloatField()
    q25 = serializers.FloatField()
    q75 = serializers.FloatField()
    whisker_low = serializers.FloatField()
    whisker_high = serializers.FloatField()

    def create(self, validated_data):
        condition = validated_data.pop('condition_dict')
        return ErrorSummary(condition=tuple(condition.items()), **validated_data)


class RtfSerializer(serializers.Serializer):
    variant = serializers.CharField()
    files = serializers.IntegerField()
    cpu_seconds = serializers.FloatField()
    audio_seconds = serializers.FloatField()
    rtf = serializers.FloatField()
