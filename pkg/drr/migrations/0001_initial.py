# Generated by Django 6.0 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='EvaluationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=200)),
                ('manifest', models.CharField(max_length=500)),
                ('variants', models.CharField(max_length=10)),
                ('seed', models.IntegerField(default=0)),
                ('config', models.JSONField(default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
        migrations.CreateModel(
            name='TrialRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('position', models.PositiveIntegerField(default=0)),
                ('file_id', models.CharField(max_length=255)),
                ('variant', models.CharField(choices=[('C', 'C'), ('D', 'D'), ('E', 'E'), ('F', 'F'), ('G', 'G')], max_length=1)),
                ('snr_db', models.FloatField(blank=True, null=True)),
                ('noise_kind', models.CharField(blank=True, max_length=32)),
                ('status', models.CharField(choices=[('ok', 'ok'), ('error', 'error')], default='ok', max_length=10)),
                ('message', models.TextField(blank=True)),
                ('estimate_db', models.FloatField(blank=True, null=True)),
                ('band_centers', models.JSONField(blank=True, default=list)),
                ('estimate_bands_db', models.JSONField(blank=True, default=list)),
                ('band_valid', models.JSONField(blank=True, default=list)),
                ('truth_db', models.FloatField(blank=True, null=True)),
                ('truth_bands_db', models.JSONField(blank=True, default=list)),
                ('error_db', models.FloatField(blank=True, null=True)),
                ('error_bands_db', models.JSONField(blank=True, default=list)),
                ('cpu_seconds', models.FloatField(default=0.0)),
                ('wall_seconds', models.FloatField(default=0.0)),
                ('audio_seconds', models.FloatField(default=0.0)),
                ('run', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='records', to='drr.evaluationrun')),
            ],
            options={
                'ordering': ['run', 'position', 'variant'],
                'indexes': [models.Index(fields=['run', 'variant'], name='drr_record_run_variant_idx')],
            },
        ),
    ]
