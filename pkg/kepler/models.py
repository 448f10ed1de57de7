from django.db import models, transaction


class ComputationRun(models.Model):
    """Запуск расчёта из командной строки"""
    COMMAND_CHOICES = [
        ('spectrum', 'Аналитический спектр'),
        ('solve', 'Численное решение'),
        ('scan', 'Сканирование связи'),
        ('verify_claims', 'Проверка утверждений'),
    ]

    run_id = models.AutoField(primary_key=True)
    command = models.CharField(max_length=50, choices=COMMAND_CHOICES, verbose_name='Команда')
    parameters = models.JSONField(default=dict, verbose_name='Параметры запуска')
    created_at = models.DateTimeField(auto_now_add=True, verbose_name='Время запуска')
    exit_status = models.IntegerField(default=0, verbose_name='Код завершения')
    summary = models.TextField(blank=True, null=True, verbose_name='Итог')
    report_text = models.TextField(blank=True, null=True, verbose_name='Текст отчёта')

    class Meta:
        verbose_name = 'Запуск расчёта'
        verbose_name_plural = 'Запуски расчётов'
        db_table = 'computation_runs'
        ordering = ['-created_at', '-run_id']

    def __str__(self):
        return f"{self.get_command_display()} #{self.run_id} ({self.created_at:%Y-%m-%d %H:%M})"

    def as_dict(self):
        return {
            'id': self.run_id,
            'command': self.command,
            'parameters': self.parameters,
            'created_at': self.created_at.isoformat() if self.created_at else None,
            'exit_status': self.exit_status,
            'summary': self.summary,
        }


class SpectrumEntry(models.Model):
    """Строка таблицы спектра: аналитическая линия или численный уровень"""
    BRANCH_CHOICES = [
        ('+', 'Положительная ветвь'),
        ('-', 'Отрицательная ветвь'),
    ]

    entry_id = models.AutoField(primary_key=True)
    run = models.ForeignKey(ComputationRun, on_delete=models.CASCADE, related_name='entries', verbose_name='Запуск')
    alpha = models.FloatField(verbose_name='α')
    beta_s = models.FloatField(verbose_name='β_s')
    kappa = models.IntegerField(verbose_name='κ')
    n_r = models.IntegerField(null=True, blank=True, verbose_name='n_r')
    branch = models.CharField(max_length=1, choices=BRANCH_CHOICES, blank=True, verbose_name='Ветвь')
    energy = models.FloatField(null=True, blank=True, verbose_name='Энергия, mc²')
    energy_analytic = models.FloatField(null=True, blank=True, verbose_name='Аналитическая энергия, mc²')
    abs_err = models.FloatField(null=True, blank=True, verbose_name='|ΔE|')
    q_eff = models.FloatField(null=True, blank=True, verbose_name='q̃')
    gamma = models.FloatField(null=True, blank=True, verbose_name='γ')
    l_star = models.FloatField(null=True, blank=True, verbose_name='l*')
    principal = models.FloatField(null=True, blank=True, verbose_name='N')
    admissible = models.BooleanField(null=True, blank=True, verbose_name='Допустима')
    host_kappa = models.IntegerField(null=True, blank=True, verbose_name='Канал-носитель')
    error = models.TextField(blank=True, null=True, verbose_name='Ошибка')

    class Meta:
        verbose_name = 'Строка спектра'
        verbose_name_plural = 'Строки спектра'
        db_table = 'spectrum_entries'
        ordering = ['entry_id']

    def __str__(self):
        if self.error:
            return f"κ={self.kappa}: {self.error}"
        return f"κ={self.kappa}, n_r={self.n_r}{self.branch}: E={self.energy}"

    def as_row(self):
        return {
            'alpha': self.alpha,
            'beta_s': self.beta_s,
            'kappa': self.kappa,
            'n_r': self.n_r,
            'branch': self.branch,
            'E': self.energy,
            'E_analytic': self.energy_analytic,
            'abs_err': self.abs_err,
            'q_eff': self.q_eff,
            'gamma': self.gamma,
            'l_star': self.l_star,
            'N': self.principal,
            'admissible': self.admissible,
            'host_kappa': self.host_kappa,
            'error': self.error,
        }


class ClaimVerdict(models.Model):
    """Вердикт по одному утверждению"""
    VERDICT_CHOICES = [
        ('supported', 'Подтверждено'),
        ('refuted', 'Опровергнуто'),
        ('boundary', 'Граничный случай'),
    ]

    verdict_id = models.AutoField(primary_key=True)
    run = models.ForeignKey(ComputationRun, on_delete=models.CASCADE, related_name='verdicts', verbose_name='Запуск')
    claim_id = models.CharField(max_length=50, verbose_name='Утверждение')
    verdict = models.CharField(max_length=20, choices=VERDICT_CHOICES, verbose_name='Вердикт')
    evidence = models.JSONField(default=list, verbose_name='Свидетельства')
    tolerances = models.JSONField(default=dict, verbose_name='Допуски')
    notes = models.JSONField(default=list, verbose_name='Примечания')

    class Meta:
        verbose_name = 'Вердикт'
        verbose_name_plural = 'Вердикты'
        db_table = 'claim_verdicts'
        ordering = ['verdict_id']

    def __str__(self):
        return f"{self.claim_id}: {self.get_verdict_display()}"

    def as_dict(self):
        return {
            'claim': self.claim_id,
            'verdict': self.verdict,
            'tolerances': self.tolerances,
            'notes': self.notes,
            'evidence': self.evidence,
        }


ENTRY_FIELDS = {
    'E': 'energy',
    'E_numeric': 'energy',
    'E_analytic': 'energy_analytic',
    'N': 'principal',
}


def _entry_kwargs(row):
    kwargs = {}
    for key, value in row.items():
        name = ENTRY_FIELDS.get(key, key)
        if name in ('alpha', 'beta_s', 'kappa', 'n_r', 'branch', 'energy', 'energy_analytic', 'abs_err', 'q_eff',
                    'gamma', 'l_star', 'principal', 'admissible', 'host_kappa', 'error'):
            kwargs[name] = value
    if kwargs.get('branch') is None:
        kwargs['branch'] = ''
    return kwargs


@transaction.atomic
def record_run(command, parameters, exit_status=0, summary='', rows=(), claims=(), report_text=None):
    """Сохраняет запуск вместе со строками таблицы и вердиктами"""
    run = ComputationRun.objects.create(
        command=command,
        parameters=parameters,
        exit_status=exit_status,
        summary=summary,
        report_text=report_text,
    )
    SpectrumEntry.objects.bulk_create([SpectrumEntry(run=run, **_entry_kwargs(row)) for row in rows])
    ClaimVerdict.objects.bulk_create([
        ClaimVerdict(
            run=run,
            claim_id=claim['claim'],
            verdict=claim['verdict'],
            evidence=claim['evidence'],
            tolerances=claim['tolerances'],
            notes=claim['notes'],
        )
        for claim in claims
    ])
    return run
