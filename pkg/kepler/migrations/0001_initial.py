# Generated by Django 6.0 on 2026-10-19 10:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ComputationRun',
            fields=[
                ('run_id', models.AutoField(primary_key=True, serialize=False)),
                ('command', models.CharField(choices=[('spectrum', 'Аналитический спектр'), ('solve', 'Численное решение'), ('scan', 'Сканирование связи'), ('verify_claims', 'Проверка утверждений')], max_length=50, verbose_name='Команда')),
                ('parameters', models.JSONField(default=dict, verbose_name='Параметры запуска')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Время запуска')),
                ('exit_status', models.IntegerField(default=0, verbose_name='Код завершения')),
                ('summary', models.TextField(blank=True, null=True, verbose_name='Итог')),
                ('report_text', models.TextField(blank=True, null=True, verbose_name='Текст отчёта')),
            ],
            options={
                'verbose_name': 'Запуск расчёта',
                'verbose_name_plural': 'Запуски расчётов',
                'db_table': 'computation_runs',
                'ordering': ['-created_at', '-run_id'],
            },
        ),
        migrations.CreateModel(
            name='ClaimVerdict',
            fields=[
                ('verdict_id', models.AutoField(primary_key=True, serialize=False)),
                ('claim_id', models.CharField(max_length=50, verbose_name='Утверждение')),
                ('verdict', models.CharField(choices=[('supported', 'Подтверждено'), ('refuted', 'Опровергнуто'), ('boundary', 'Граничный случай')], max_length=20, verbose_name='Вердикт')),
                ('evidence', models.JSONField(default=list, verbose_name='Свидетельства')),
                ('tolerances', models.JSONField(default=dict, verbose_name='Допуски')),
                ('notes', models.JSONField(default=list, verbose_name='Примечания')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='verdicts', to='kepler.computationrun', verbose_name='Запуск')),
            ],
            options={
                'verbose_name': 'Вердикт',
                'verbose_name_plural': 'Вердикты',
                'db_table': 'claim_verdicts',
                'ordering': ['verdict_id'],
            },
        ),
        migrations.CreateModel(
            name='SpectrumEntry',
            fields=[
                ('entry_id', models.AutoField(primary_key=True, serialize=False)),
                ('alpha', models.FloatField(verbose_name='α')),
                ('beta_s', models.FloatField(verbose_name='β_s')),
                ('kappa', models.IntegerField(verbose_name='κ')),
                ('n_r', models.IntegerField(blank=True, null=True, verbose_name='n_r')),
                ('branch', models.CharField(blank=True, choices=[('+', 'Положительная ветвь'), ('-', 'Отрицательная ветвь')], max_length=1, verbose_name='Ветвь')),
                ('energy', models.FloatField(blank=True, null=True, verbose_name='Энергия, mc²')),
                ('energy_analytic', models.FloatField(blank=True, null=True, verbose_name='Аналитическая энергия, mc²')),
                ('abs_err', models.FloatField(blank=True, null=True, verbose_name='|ΔE|')),
                ('q_eff', models.FloatField(blank=True, null=True, verbose_name='q̃')),
                ('gamma', models.FloatField(blank=True, null=True, verbose_name='γ')),
                ('l_star', models.FloatField(blank=True, null=True, verbose_name='l*')),
                ('principal', models.FloatField(blank=True, null=True, verbose_name='N')),
                ('admissible', models.BooleanField(blank=True, null=True, verbose_name='Допустима')),
                ('host_kappa', models.IntegerField(blank=True, null=True, verbose_name='Канал-носитель')),
                ('error', models.TextField(blank=True, null=True, verbose_name='Ошибка')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='entries', to='kepler.computationrun', verbose_name='Запуск')),
            ],
            options={
                'verbose_name': 'Строка спектра',
                'verbose_name_plural': 'Строки спектра',
                'db_table': 'spectrum_entries',
                'ordering': ['entry_id'],
            },
        ),
    ]
