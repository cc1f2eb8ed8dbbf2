"""
Formateo de tablas y reportes de la consola
"""

from typing import List, Sequence

from analysis.metrics import MetricsSummary
from analysis.verification import CheckResult
from ui.interface import ANSI

BOLD = '\033[1m'


class ReportFormatter:
    """Tablas de resumen, reporte de verificación y problemas de trazas"""

    def __init__(self, settings):
        self.settings = settings
        self.use_color = settings.cli['colors']

    def paint(self, text: str, color: str, bold: bool = False) -> str:
        if not self.use_color:
            return text
        prefix = (BOLD if bold else '') + ANSI[color]
        return f"{prefix}{text}{ANSI['reset']}"

    def format_table(self, headers: Sequence[str], rows: List[Sequence[str]]) -> str:
        """Columnas alineadas a la izquierda con separador ' | '"""
        if not rows:
            return ""

        widths = [max(len(str(cell)) for cell in column) for column in zip(headers, *rows)]
        header = " | ".join(self.paint(h.ljust(w), 'cyan', bold=True) for h, w in zip(headers, widths))
        rule = self.paint("─" * (sum(widths) + 3 * (len(widths) - 1)), 'gray')
        body = [" | ".join(str(cell).ljust(w) for cell, w in zip(row, widths)) for row in rows]
        return "\n".join([header, rule, *body])

    def format_summary_table(self, summaries: Sequence[MetricsSummary]) -> str:
        """Utilidad, costo, éxito y regret por algoritmo"""
        headers = ['Algoritmo', 'Trials', 'Pasos', 'Utilidad', 'Costo', 'Éxito', 'Regret']
        rows = [
            [s.algorithm, s.num_trials, s.horizon, f"{s.avg_utility:.4f}", f"{s.avg_cost:.4f}",
             f"{s.avg_success:.4f}", "-" if s.cum_regret is None else f"{s.cum_regret:.2f}"]
            for s in summaries
        ]
        return "📊 Resumen\n" + self.format_table(headers, rows)

    def format_verification(self, results: Sequence[CheckResult]) -> str:
        """Reporte de la suite de verificación"""
        lines = [self.paint("📊 Verificación cruzada", 'cyan', bold=True)]
        for result in results:
            mark, color = ('✅', 'green') if result.passed else ('❌', 'red')
            lines.append(f"{mark} {self.paint(result.name, color)} {self.paint(f'({result.elapsed:.1f}s)', 'gray')}")
            lines.append(f"   {result.detail}")

        passed = sum(r.passed for r in results)
        verdict = 'green' if passed == len(results) else 'yellow'
        lines.append("")
        lines.append(self.paint(f"{passed}/{len(results)} verificaciones correctas", verdict, bold=True))
        return "\n".join(lines)

    def format_problems(self, problems: Sequence[str], limit: int = 20) -> str:
        """Lista de problemas de una traza, truncada"""
        lines = [f"  • {problem}" for problem in problems[:limit]]
        if len(problems) > limit:
            lines.append(self.paint(f"  ... y {len(problems) - limit} más", 'gray'))
        return "\n".join(lines)
