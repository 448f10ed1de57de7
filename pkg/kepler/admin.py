from django.contrib import admin

from .models import ClaimVerdict, ComputationRun, SpectrumEntry


class SpectrumEntryInline(admin.TabularInline):
    model = SpectrumEntry
    extra = 0
    fields = ('kappa', 'n_r', 'branch', 'energy', 'energy_analytic', 'abs_err', 'admissible', 'host_kappa', 'error')
    readonly_fields = fields


class ClaimVerdictInline(admin.TabularInline):
    model = ClaimVerdict
    extra = 0
    fields = ('claim_id', 'verdict', 'notes')
    readonly_fields = fields


@admin.register(ComputationRun)
class ComputationRunAdmin(admin.ModelAdmin):
    list_display = ('run_id', 'command', 'created_at', 'exit_status', 'summary')
    list_filter = ('command', 'exit_status')
    search_fields = ('summary',)
    inlines = [SpectrumEntryInline, ClaimVerdictInline]


@admin.register(SpectrumEntry)
class SpectrumEntryAdmin(admin.ModelAdmin):
    list_display = ('run', 'alpha', 'beta_s', 'kappa', 'n_r', 'branch', 'energy', 'admissible')
    list_filter = ('kappa', 'branch', 'admissible')


@admin.register(ClaimVerdict)
class ClaimVerdictAdmin(admin.ModelAdmin):
    list_display = ('run', 'claim_id', 'verdict')
    list_filter = ('claim_id', 'verdict')
