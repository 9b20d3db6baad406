"""
Read-only API over stored evaluation runs.
Runs and their records are listed as plain resources; the summary, RTF and
plot data actions recompute the statistics from the stored records.
"""

from rest_framework import status, viewsets
from rest_framework.decorators import action
from rest_framework.exceptions import ValidationError
from rest_framework.response import Response

from drr.exceptions import DenbeError
from drr.harness.statistics import DEFAULT_GROUP_BY, parse_group_by, rtf_table, summarize
from drr.models import EvaluationRun, TrialRecord
from drr.serializers import (
    ErrorSummarySerializer,
    EvaluationRunSerializer,
    RtfSerializer,
    TrialRecordDetailSerializer,
)


# =========================================================
# 1. EVALUATION RUNS
# =========================================================

class EvaluationRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    - GET /api/runs/                  list runs, newest first
    - GET /api/runs/{id}/             one run
    - GET /api/runs/{id}/summary/     boxplot statistics (?group_by=variant,snr_db)
    - GET /api/runs/{id}/rtf/         real-time factor per variant
    - GET /api/runs/{id}/plotdata/    boxplot quintuples per condition
    """
    queryset = EvaluationRun.objects.all()
    serializer_class = EvaluationRunSerializer

    def _group_by(self, request):
        value = request.query_params.get('group_by')
        return DEFAULT_GROUP_BY if value is None else parse_group_by(value)

    @action(detail=True, methods=['get'])
    def summary(self, request, pk=None):
        run = self.get_object()
        try:
            summaries = summarize(run.records.all(), self._group_by(request))
        except DenbeError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(ErrorSummarySerializer(summaries, many=True).data)

    @action(detail=True, methods=['get'])
    def rtf(self, request, pk=None):
        run = self.get_object()
        try:
            rows = rtf_table(list(run.records.all()))
        except DenbeError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(RtfSerializer(rows, many=True).data)

    @action(detail=True, methods=['get'])
    def plotdata(self, request, pk=None):
        run = self.get_object()
        try:
            summaries = summarize(run.records.all(), self._group_by(request))
        except DenbeError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        rows = [
            {'condition': summary.label, 'quintuple': list(summary.quintuple()),
             'count': summary.count}
            for summary in summaries
        ]
        return Response(rows)


# =========================================================
# 2. TRIAL RECORDS
# =========================================================

class TrialRecordViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Trial records in run and manifest order.
    Filter with ?run=<id> and ?variant=<letter>.
    """
    queryset = TrialRecord.objects.all()
    serializer_class = TrialRecordDetailSerializer

    def get_queryset(self):
        queryset = super().get_queryset()
        run = self.request.query_params.get('run')
        variant = self.request.query_params.get('variant')
        if run is not None:
            if not run.isdigit():
                raise ValidationError({'run': 'expected a run id'})
            queryset = queryset.filter(run_id=int(run))
        if variant is not None:
            queryset = queryset.filter(variant=variant.upper())
        return queryset
