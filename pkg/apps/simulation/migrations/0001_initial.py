# Generated by Django 4.2.9 on 2026-10-19 10:00

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('scenario_name', models.CharField(db_index=True, max_length=100, verbose_name='Scenario')),
                ('master_seed', models.BigIntegerField(verbose_name='Master seed')),
                ('replicate', models.PositiveIntegerField(default=0, verbose_name='Replicate')),
                ('trace_sha256', models.CharField(max_length=64, verbose_name='Trace digest')),
                ('duration_s', models.PositiveIntegerField(verbose_name='Duration, s')),
                ('episodes', models.PositiveIntegerField(default=1, verbose_name='Episodes')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Created at')),
            ],
            options={
                'verbose_name': 'Simulation run',
                'verbose_name_plural': 'Simulation runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='NtlReport',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('label', models.CharField(max_length=64, verbose_name='NTL label')),
                ('n_samples', models.PositiveIntegerField(verbose_name='Samples')),
                ('warmup', models.PositiveIntegerField(default=0, verbose_name='Warm-up samples')),
                ('cle', models.FloatField(verbose_name='CLE, m')),
                ('mae', models.FloatField(verbose_name='MAE, m')),
                ('rmse', models.FloatField(verbose_name='RMSE, m')),
                ('within_bound', models.JSONField(default=dict, help_text='Error index -> fraction', verbose_name='Within bound')),
                ('index_histogram', models.JSONField(default=dict, verbose_name='Error index histogram')),
                ('fgl_count', models.PositiveIntegerField(default=0, verbose_name='Fine fixes')),
                ('fgl_unavailable', models.PositiveIntegerField(default=0, verbose_name='Unavailable fine fixes')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='reports', to='simulation.simulationrun', verbose_name='Run')),
            ],
            options={
                'verbose_name': 'NTL report',
                'verbose_name_plural': 'NTL reports',
                'constraints': [models.UniqueConstraint(fields=('run', 'label'), name='unique_report_per_run_label')],
            },
        ),
    ]
