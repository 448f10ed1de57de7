from django.contrib.auth.decorators import login_required
from django.http import Http404, HttpResponse, JsonResponse
from django.shortcuts import get_object_or_404

from .models import ComputationRun


@login_required
def runs_list(request):
    """Список сохранённых запусков"""
    command_filter = request.GET.get('command', '')

    runs = ComputationRun.objects.all()
    if command_filter:
        runs = runs.filter(command=command_filter)

    return JsonResponse({'runs': [run.as_dict() for run in runs]}, json_dumps_params={'ensure_ascii': False})


@login_required
def run_detail(request, pk):
    """Запуск со строками таблицы и вердиктами"""
    run = get_object_or_404(ComputationRun, pk=pk)
    payload = {
        'run': run.as_dict(),
        'entries': [entry.as_row() for entry in run.entries.all()],
        'verdicts': [verdict.as_dict() for verdict in run.verdicts.all()],
    }
    return JsonResponse(payload, json_dumps_params={'ensure_ascii': False})


@login_required
def run_report(request, pk):
    """Текст отчёта проверки утверждений"""
    run = get_object_or_404(ComputationRun, pk=pk)
    if not run.report_text:
        raise Http404('У запуска нет текстового отчёта')
    return HttpResponse(run.report_text, content_type='text/plain; charset=utf-8')
