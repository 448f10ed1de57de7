"""
Сериализация таблиц и отчётов: csv, json и текст.

Числа в csv печатаются с 17 значащими цифрами, в json кратчайшим точным
представлением, так что разбор файла восстанавливает значения побитово.
"""

import csv
import io
import json
import math

SPECTRUM_COLUMNS = ('kappa', 'n_r', 'branch', 'E', 'q_eff', 'admissible', 'gamma', 'l_star', 'N',
                    'host_kappa', 'error')
SOLVE_COLUMNS = ('kappa', 'n_r', 'E_numeric', 'E_analytic', 'abs_err', 'q_eff', 'gamma', 'l_star', 'N')
SCAN_COLUMNS = ('alpha', 'beta_s') + SPECTRUM_COLUMNS

ENERGY_COLUMNS = ('E', 'E_numeric', 'E_analytic', 'abs_err')


def format_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format(value, '.17g')
    return str(value)


def _clean(value):
    """nan и inf в json заменяются на null"""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if hasattr(value, 'item') and callable(value.item):
        return _clean(value.item())
    return value


def scale_energies(rows, scale):
    """Перевод энергий из единиц mc² (например, в эВ при scale = mc²)"""
    if scale == 1.0:
        return rows
    scaled = []
    for row in rows:
        row = dict(row)
        for column in ENERGY_COLUMNS:
            if isinstance(row.get(column), float):
                row[column] = row[column] * scale
        scaled.append(row)
    return scaled


def render_csv(columns, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(column)) for column in columns])
    return buffer.getvalue()


def render_json(payload) -> str:
    return json.dumps(_clean(payload), ensure_ascii=False, indent=2) + '\n'


def render_text(columns, rows, title=None) -> str:
    cells = [[_text_cell(row.get(column)) for column in columns] for row in rows]
    widths = [max([len(column)] + [len(line[i]) for line in cells]) for i, column in enumerate(columns)]
    lines = []
    if title:
        lines.append(title)
    lines.append('  '.join(column.rjust(width) for column, width in zip(columns, widths)))
    for line in cells:
        lines.append('  '.join(cell.rjust(width) for cell, width in zip(line, widths)))
    return '\n'.join(lines) + '\n'


def _text_cell(value):
    if isinstance(value, float):
        return format(value, '.12g')
    return format_value(value) or '-'


def render_table(columns, rows, output_format, title=None) -> str:
    if output_format == 'csv':
        return render_csv(columns, rows)
    if output_format == 'json':
        return render_json([{column: row.get(column) for column in columns} for row in rows])
    return render_text(columns, rows, title)


def parse_csv(text):
    """Обратный разбор render_csv: числа в float/int, пустые ячейки в None"""
    reader = csv.DictReader(io.StringIO(text))
    return [{key: _parse_cell(value) for key, value in row.items()} for row in reader]


def _parse_cell(value):
    if value == '':
        return None
    if value in ('true', 'false'):
        return value == 'true'
    for kind in (int, float):
        try:
            return kind(value)
        except ValueError:
            continue
    return value


def render_report_text(report) -> str:
    """Человекочитаемый отчёт по утверждениям (FullReport)"""
    lines = [report.header, '']
    grid = report.grid
    lines.append(f'Сетка: α ∈ {list(grid.alphas)}, β_s ∈ {list(grid.betas)}, κ ∈ {list(grid.kappas)}, '
                 f'n_r ≤ {grid.nr_max}')
    lines.append('')
    for claim in report.claims:
        lines.append(f'[{claim.verdict}] {claim.claim_id}')
        for note in claim.notes:
            lines.append(f'    {note}')
        lines.append(f'    строк свидетельств: {len(claim.evidence)}')
    if report.sweep is not None:
        sweep = report.sweep
        lines.append('')
        lines.append(f'Сравнение с численным решением: {len(sweep.rows)} линий, '
                     f'макс. |ΔE| = {sweep.max_error:.3e}, '
                     f'без пары: {len(sweep.unmatched_analytic)} аналит., {len(sweep.unmatched_numeric)} числ.')
    for check in report.factorization:
        lines.append(f'Факторизация κ={check.kappa}: невязки {check.residuals[0]:.3e} → '
                     f'{check.residuals[1]:.3e}, порядок {check.order:.2f}')
    for note in report.notes:
        lines.append(f'Примечание: {note}')
    lines.append('')
    lines.append('Итог: все утверждения подтверждены' if report.all_supported
                 else 'Итог: не все утверждения подтверждены')
    return '\n'.join(lines) + '\n'
