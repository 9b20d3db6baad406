"""
Database models for evaluation runs.
An EvaluationRun is one pass of the corpus runner over a manifest; every
(file, variant) pair it processed is stored as a TrialRecord.
"""

from django.db import models


class EvaluationRun(models.Model):
    """
    One invocation of ``evaluate``: the manifest it read, the variants it ran
    and the estimator configuration it used.
    """
    name = models.CharField(max_length=200, blank=True)

    # Manifest path as given on the command line
    manifest = models.CharField(max_length=500)

    # Variant letters in run order, e.g. "CDEFG"
    variants = models.CharField(max_length=10)

    seed = models.IntegerField(default=0)

    # DenbeConfig as a plain dict, so a stored run can be reproduced
    config = models.JSONField(default=dict)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f'Run {self.pk} ({self.variants}) on {self.manifest}'


class TrialRecord(models.Model):
    """
    Result of one variant on one corpus file.

    ``error_db`` is only set where both the estimate and the ground truth
    are valid. Per-band values are JSON lists aligned with ``band_centers``;
    invalid entries are stored as null.
    """
    STATUS_OK = 'ok'
    STATUS_ERROR = 'error'
    STATUS_CHOICES = [(STATUS_OK, 'ok'), (STATUS_ERROR, 'error')]

    VARIANT_CHOICES = [(letter, letter) for letter in 'CDEFG']

    # Records can exist without a run while the runner is still producing them
    run = models.ForeignKey(EvaluationRun, on_delete=models.CASCADE, related_name='records',
                            null=True, blank=True)

    # Manifest line order, used to keep output deterministic
    position = models.PositiveIntegerField(default=0)

    file_id = models.CharField(max_length=255)
    variant = models.CharField(max_length=1, choices=VARIANT_CHOICES)

    # Null means no noise was added
    snr_db = models.FloatField(null=True, blank=True)
    noise_kind = models.CharField(max_length=32, blank=True)

    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default=STATUS_OK)
    message = models.TextField(blank=True)

    estimate_db = models.FloatField(null=True, blank=True)
    band_centers = models.JSONField(default=list, blank=True)
    estimate_bands_db = models.JSONField(default=list, blank=True)
    band_valid = models.JSONField(default=list, blank=True)

    truth_db = models.FloatField(null=True, blank=True)
    truth_bands_db = models.JSONField(default=list, blank=True)

    error_db = models.FloatField(null=True, blank=True)
    error_bands_db = models.JSONField(default=list, blank=True)

    # Timing is kept out of the deterministic report sections
    cpu_seconds = models.FloatField(default=0.0)
    wall_seconds = models.FloatField(default=0.0)
    audio_seconds = models.FloatField(default=0.0)

    class Meta:
        ordering = ['run', 'position', 'variant']
        indexes = [models.Index(fields=['run', 'variant'], name='drr_record_run_variant_idx')]

    def __str__(self):
        return f'{self.file_id} [{self.variant}] {self.status}'

    @property
    def ok(self):
        return self.status == self.STATUS_OK
