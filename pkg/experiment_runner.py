"""
Executor de experimentos de transporte de ergotropia.

Cada experimento gera uma tabela pronta para gráficos, um sidecar de
metadados suficiente para reproduzir a execução e, quando há cotas
analíticas, um arquivo com as curvas numa grade.

Uso:
    python experiment_runner.py run --experiment propeller --samples 10000
    python experiment_runner.py summarize results/propeller.csv
"""

import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from scipy.stats import linregress

from config import Config
from results_manager import ResultsManager, build_identifier
from transport.bounds import (
    QmpSpectra,
    levy_overlay,
    overlay_curves,
    propeller_violations,
    qmp_general,
    qmp_two_qubit,
)
from transport.cycles import run_cycles
from transport.ensemble import (
    DEFAULT_TAIL_ELLS,
    dispersion_stats,
    ensemble_statistics,
    histogram,
    power_law_fit,
    run_ensemble,
    scan_dimensions,
    tail_probability,
)
from transport.errors import ResultsFormatError, TransportError
from transport.models import (
    CycleConfig,
    EnsembleConfig,
    ExperimentSpec,
    RunMetadata,
    SummaryReport,
    TransportSample,
)
from transport.sampling import RngStream, hs_state
from transport.states import BipartiteState

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

EXPERIMENTS = (
    'prod-hist', 'sep-vs-gen', 'propeller', 'avg-shift', 'sampler-compare',
    'concentration', 'dispersion', 'cycles', 'qmp-fuzz',
)

DEFAULT_STATE_CLASS = {
    'prod-hist': 'product',
    'avg-shift': 'product',
}

DEFAULT_SWEEPS = {
    'avg-shift': [(2, 2), (3, 3), (4, 4), (5, 5)],
    'concentration': [(2, 2), (3, 3), (4, 4), (5, 5), (6, 6)],
    'dispersion': [(3, 5), (6, 6)],
}

QMP_ENERGY_PAIRS = 10
QMP_GENERAL_MAX_DIM = 3
SUMMARY_COLUMNS = ('gain_over_e', 'gain', 'mean_gain', 'min_slack')


@dataclass
class ExperimentResult:
    """Tabela principal, curvas analíticas opcionais e resumo para o sidecar"""
    rows: List[Dict[str, Any]]
    overlay: Optional[List[Dict[str, Any]]] = None
    extra: Dict[str, Any] = field(default_factory=dict)


def _sample_rows(samples: List[TransportSample], **columns) -> List[Dict[str, Any]]:
    return [{**columns, **s.model_dump()} for s in samples]


def _separable_class(cfg: EnsembleConfig) -> str:
    """PFHS quando é exato (d_B·d_C ≤ 6), HDU caso contrário"""
    return 'separable_pfhs' if cfg.d_bc <= 6 else 'separable_hdu'


class ExperimentRunner:
    """
    Executa um ExperimentSpec e grava resultados, curvas e metadados
    """

    def __init__(self, spec: ExperimentSpec, bins_2d: int = Config.BINS_2D, bins_entropy: int = Config.BINS_ENTROPY):
        self.spec = spec
        self.config = spec.config
        self.bins_2d = bins_2d
        self.bins_entropy = bins_entropy
        self.manager = ResultsManager(spec.output_path, spec.format)
        self._experiments: Dict[str, Callable[[], ExperimentResult]] = {
            'prod-hist': self.product_histogram,
            'sep-vs-gen': self.separable_vs_general,
            'propeller': self.propeller,
            'avg-shift': self.average_shift,
            'sampler-compare': self.sampler_compare,
            'concentration': self.concentration,
            'dispersion': self.dispersion,
            'cycles': self.cycles,
            'qmp-fuzz': self.qmp_fuzz,
        }

    def _ensemble(self, **updates) -> List[TransportSample]:
        cfg = EnsembleConfig(**{**self.config.model_dump(), **updates}) if updates else self.config
        return run_ensemble(cfg, threads=self.spec.threads, show_progress=self.spec.show_progress)

    def _sweep_configs(self) -> List[EnsembleConfig]:
        dims = self.spec.sweep or DEFAULT_SWEEPS[self.spec.name]
        return [
            EnsembleConfig(**{**self.config.model_dump(), 'd_b': d_b, 'd_c': d_c})
            for d_b, d_c in dims
        ]

    # ------------------------------------------------------------------
    # Experimentos
    # ------------------------------------------------------------------

    def product_histogram(self) -> ExperimentResult:
        """Histogramas de 𝓔_G/E e ΔI para uma classe de estados"""
        samples = self._ensemble()
        gain = [s.gain_over_e for s in samples]
        mi = [s.delta_mi for s in samples]
        hist_gain = histogram(gain, self.config.bins)
        hist_mi = histogram(mi, self.config.bins)
        return ExperimentResult(
            rows=_sample_rows(samples, state_class=self.config.state_class),
            extra={
                'statistics': asdict(ensemble_statistics(samples)),
                'histogram_gain': {'counts': hist_gain.counts.tolist(), 'edges': hist_gain.edges.tolist()},
                'histogram_delta_mi': {'counts': hist_mi.counts.tolist(), 'edges': hist_mi.edges.tolist()},
            },
        )

    def separable_vs_general(self) -> ExperimentResult:
        """Produto, separável e geral nas mesmas dimensões"""
        rows, means = [], {}
        for state_class in ('product', _separable_class(self.config), 'general'):
            samples = self._ensemble(state_class=state_class)
            rows.extend(_sample_rows(samples, state_class=state_class))
            stats = ensemble_statistics(samples)
            means[state_class] = {'mean_gain': stats.mean_gain, 'se_gain': stats.se_gain}
        return ExperimentResult(rows=rows, extra={'means': means})

    def propeller(self) -> ExperimentResult:
        """Nuvem (ΔI, 𝓔_G/E) com o envelope γ e as cotas lineares"""
        samples = self._ensemble()
        violations = propeller_violations(
            [s.delta_mi for s in samples], [s.gain_over_e for s in samples]
        )
        if any(violations.values()):
            logger.warning(f"⚠️ Pontos fora das cotas analíticas: {violations}")
        return ExperimentResult(
            rows=_sample_rows(samples),
            overlay=overlay_curves(self.spec.overlay_points),
            extra={'violations': violations, 'bins_2d': self.bins_2d},
        )

    def average_shift(self) -> ExperimentResult:
        """⟨𝓔_G/E⟩ por dimensão e ajuste de lei de potência de −⟨𝓔_G/E⟩"""
        points = scan_dimensions(self._sweep_configs(), self.spec.threads, self.spec.show_progress)
        rows = [
            {
                'd_b': p.config.d_b,
                'd_c': p.config.d_c,
                'd_bc': p.config.d_bc,
                'mean_gain': p.stats.mean_gain,
                'sd_gain': p.stats.sd_gain,
                'se_gain': p.stats.se_gain,
                'mean_delta_mi': p.stats.mean_mi,
            }
            for p in points
        ]
        extra: Dict[str, Any] = {}
        means = np.array([r['mean_gain'] for r in rows])
        if len(rows) >= 3 and np.all(means < 0):
            fit = power_law_fit([r['d_bc'] for r in rows], -means)
            extra['power_law'] = asdict(fit)
            logger.info(f"✅ Expoente da lei de potência: μ = {fit.exponent:.3f}")
        else:
            logger.warning("⚠️ Ajuste de lei de potência exige ≥ 3 médias negativas")
        return ExperimentResult(rows=rows, extra=extra)

    def sampler_compare(self) -> ExperimentResult:
        """HDU contra PFHS nas mesmas dimensões"""
        rows, summary = [], {}
        for state_class in ('separable_hdu', 'separable_pfhs'):
            samples = self._ensemble(state_class=state_class)
            rows.extend(_sample_rows(samples, state_class=state_class))
            stats = ensemble_statistics(samples)
            summary[state_class] = {
                'mean_gain': stats.mean_gain,
                'sd_gain': stats.sd_gain,
                'se_gain': stats.se_gain,
            }
        hdu, pfhs = summary['separable_hdu'], summary['separable_pfhs']
        combined_se = math.hypot(hdu['se_gain'], pfhs['se_gain'])
        summary['means_agree_3se'] = abs(hdu['mean_gain'] - pfhs['mean_gain']) <= 3 * combined_se
        summary['hdu_more_concentrated'] = hdu['sd_gain'] <= pfhs['sd_gain']
        return ExperimentResult(rows=rows, extra=summary)

    def concentration(self) -> ExperimentResult:
        """DP e caudas empíricas por dimensão, com as caudas de Levy"""
        ells = self.spec.ells or list(DEFAULT_TAIL_ELLS)
        points = scan_dimensions(self._sweep_configs(), self.spec.threads, self.spec.show_progress)
        rows, overlay = [], []
        for p in points:
            gain = [s.gain_over_e for s in p.samples]
            mi = [s.delta_mi for s in p.samples]
            for ell in ells:
                rows.append({
                    'd_b': p.config.d_b,
                    'd_c': p.config.d_c,
                    'd_bc': p.config.d_bc,
                    'ell': ell,
                    'sd_delta_mi': p.stats.sd_mi,
                    'sd_gain': p.stats.sd_gain,
                    'tail_delta_mi': tail_probability(mi, ell),
                    'tail_gain': tail_probability(gain, ell),
                })
            overlay.extend(
                {'d_b': p.config.d_b, 'd_c': p.config.d_c, **row}
                for row in levy_overlay(p.config.d_b, p.config.d_c, ells)
            )

        extra: Dict[str, Any] = {}
        sd = np.array([p.stats.sd_mi for p in points])
        if len(points) >= 2 and np.all(sd > 0):
            fit = linregress([p.config.d_bc for p in points], 1.0 / sd)
            extra['inverse_sd_fit'] = {
                'slope': float(fit.slope),
                'intercept': float(fit.intercept),
                'r_squared': float(fit.rvalue ** 2),
            }
        return ExperimentResult(rows=rows, overlay=overlay, extra=extra)

    def dispersion(self) -> ExperimentResult:
        """Retângulo mínimo e entropia condicional dos ensembles reescalonados"""
        ells = self.spec.ells or list(DEFAULT_TAIL_ELLS)
        rows = []
        for p in scan_dimensions(self._sweep_configs(), self.spec.threads, self.spec.show_progress):
            stats = dispersion_stats(p.samples, self.bins_entropy, ells)
            rect = stats.rect
            rows.append({
                'd_b': p.config.d_b,
                'd_c': p.config.d_c,
                'd_bc': p.config.d_bc,
                'width': rect.width if rect else float('nan'),
                'length': rect.length if rect else float('nan'),
                'angle': rect.angle if rect else float('nan'),
                'ratio': rect.ratio if rect else float('nan'),
                'conditional_entropy': stats.conditional_entropy,
                'sd_gain': stats.sd_gain,
                'sd_delta_mi': stats.sd_mi,
            })
        return ExperimentResult(rows=rows, extra={'bins_entropy': self.bins_entropy})

    def cycles(self) -> ExperimentResult:
        """Tabela por iteração do protocolo de ciclos"""
        trace = run_cycles(self.config)
        return ExperimentResult(
            rows=trace.to_rows(),
            extra={
                'gainful_iterations': len(trace.gainful),
                'total_lossless': trace.total_lossless,
                'total_injected': trace.total_injected,
                'out_of_regime': trace.out_of_regime,
            },
        )

    def qmp_fuzz(self) -> ExperimentResult:
        """Desigualdades do QMP sobre espectros de estados HS sorteados"""
        cfg = self.config
        two_qubit = (cfg.d_b, cfg.d_c) == (2, 2)
        general = max(cfg.d_b, cfg.d_c) <= QMP_GENERAL_MAX_DIM
        rows = []
        for i in range(cfg.n_samples):
            stream = RngStream(cfg.master_seed, i)
            state = BipartiteState(cfg.d_b, cfg.d_c, hs_state(cfg.d_bc, stream.child(0)))
            spectra = QmpSpectra.from_state(state)
            row: Dict[str, Any] = {'sample_index': i}
            if two_qubit:
                report = qmp_two_qubit(spectra)
                row['two_qubit_passed'] = report.passed
                row['min_slack'] = min(report.slacks.values())
            if general:
                energies = stream.child(1).generator
                passed = 0
                for _ in range(QMP_ENERGY_PAIRS):
                    e_b = energies.normal(size=cfg.d_b)
                    e_c = energies.normal(size=cfg.d_c)
                    passed += qmp_general(spectra, e_b - e_b.mean(), e_c - e_c.mean())
                row['general_passed'] = passed
                row['general_checks'] = QMP_ENERGY_PAIRS
            rows.append(row)

        failures = sum(
            (not r.get('two_qubit_passed', True)) or r.get('general_passed', 0) < r.get('general_checks', 0)
            for r in rows
        )
        if failures:
            logger.warning(f"⚠️ {failures} estados violam desigualdades do QMP")
        return ExperimentResult(rows=rows, extra={'failures': failures})

    # ------------------------------------------------------------------

    def run(self) -> Dict[str, Path]:
        """Executa o experimento e grava resultados, curvas e metadados"""
        started_at = datetime.now(timezone.utc).isoformat()
        start = time.perf_counter()
        logger.info(f"🚀 Iniciando experimento {self.spec.name}")

        result = self._experiments[self.spec.name]()
        config = self.spec.model_dump(mode='json', include={'name', 'config', 'sweep', 'ells', 'overlay_points'})

        files = {'results': self.manager.save_records(self.spec.name, result.rows, config)}
        if result.overlay is not None:
            files['overlay'] = self.manager.save_overlay(self.spec.name, result.overlay)

        wall_time = time.perf_counter() - start
        metadata = RunMetadata(
            experiment=self.spec.name,
            config=self.spec.model_dump(mode='json'),
            master_seed=getattr(self.config, 'master_seed', None),
            build_id=build_identifier(),
            started_at=started_at,
            wall_time_s=wall_time,
            n_records=len(result.rows),
            files={k: str(v) for k, v in files.items()},
            extra=result.extra,
        )
        files['metadata'] = self.manager.save_metadata(metadata)

        logger.info(f"✅ {self.spec.name}: {len(result.rows)} registros em {wall_time:.1f}s")
        return files


# ----------------------------------------------------------------------
# Resumo de arquivos de resultados
# ----------------------------------------------------------------------

def summarize_results(path: Path) -> SummaryReport:
    df = ResultsManager.load_records(path)
    column = next((c for c in SUMMARY_COLUMNS if c in df.columns), None)
    if column is None:
        raise ResultsFormatError(f"{path} não tem nenhuma das colunas {SUMMARY_COLUMNS}")

    values = df[column].astype(float).to_numpy()
    violations = None
    if {'delta_mi', 'gain_over_e'} <= set(df.columns):
        violations = propeller_violations(df['delta_mi'].to_numpy(), df['gain_over_e'].to_numpy())

    return SummaryReport(
        source=str(path),
        n_records=len(values),
        column=column,
        mean=float(values.mean()),
        sd=float(values.std()),
        min=float(values.min()),
        max=float(values.max()),
        positive_fraction=float(np.mean(values > 0)) if column != 'min_slack' else None,
        bound_violations=violations,
    )


def print_summary(report: SummaryReport, console: Optional[Console] = None):
    console = console or Console()
    table = Table(title=f"📊 {report.source} ({report.n_records} registros, coluna {report.column})")
    table.add_column("Métrica")
    table.add_column("Valor", justify="right")
    table.add_row("Média", f"{report.mean:.6g}")
    table.add_row("DP", f"{report.sd:.6g}")
    table.add_row("Mínimo", f"{report.min:.6g}")
    table.add_row("Máximo", f"{report.max:.6g}")
    if report.positive_fraction is not None:
        table.add_row("Fração com ganho > 0", f"{report.positive_fraction:.4f}")
    if report.bound_violations is not None:
        table.add_row("Violações do envelope γ", str(report.bound_violations['envelope']))
        table.add_row("Violações das cotas lineares", str(report.bound_violations['linear']))
    console.print(table)


# ----------------------------------------------------------------------
# CLI
# ----------------------------------------------------------------------

def setup_logging(level: str = Config.LOG_LEVEL):
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )


def _parse_sweep(value: Optional[str]) -> Optional[List[Tuple[int, int]]]:
    """'2x2,3x3' → [(2, 2), (3, 3)]"""
    if not value:
        return None
    try:
        return [tuple(int(x) for x in item.lower().split('x')) for item in value.split(',')]
    except ValueError as e:
        raise click.BadParameter(f"Formato esperado: 2x2,3x3 (recebido {value!r})") from e


def build_spec(
    experiment: str,
    d_b: int,
    d_c: int,
    samples: int,
    seed: int,
    state_class: Optional[str],
    grain: float,
    bins: int,
    out: str,
    fmt: str,
    threads: int,
    kappa: float,
    eps: float,
    iterations: int,
    sweep: Optional[List[Tuple[int, int]]] = None,
    ells: Optional[List[float]] = None,
    show_progress: bool = True,
    phases: bool = False,
) -> ExperimentSpec:
    if experiment == 'cycles':
        config = CycleConfig(kappa=kappa, eps_error=eps, iterations=iterations)
    else:
        config = EnsembleConfig(
            d_b=d_b,
            d_c=d_c,
            n_samples=samples,
            state_class=state_class or DEFAULT_STATE_CLASS.get(experiment, 'general'),
            grain=grain,
            master_seed=seed,
            bins=bins,
            pfhs_max_attempts=Config.PFHS_MAX_ATTEMPTS,
            gap_max_attempts=Config.GAP_MAX_ATTEMPTS,
            unitary_phases=phases,
        )
    return ExperimentSpec(
        name=experiment,
        config=config,
        output_path=Path(out),
        format=fmt,
        threads=threads,
        sweep=sweep,
        ells=ells,
        show_progress=show_progress,
    )


@click.group()
@click.option('--log-level', default=Config.LOG_LEVEL, show_default=True, help='Nível de log')
def cli(log_level):
    """Experimentos de transporte de ergotropia"""
    setup_logging(log_level)


@cli.command()
@click.option('--experiment', type=click.Choice(EXPERIMENTS), required=True)
@click.option('--db', 'd_b', type=int, default=2, show_default=True, help='Dimensão de B')
@click.option('--dc', 'd_c', type=int, default=2, show_default=True, help='Dimensão de C')
@click.option('--samples', type=int, default=Config.SAMPLES, show_default=True)
@click.option('--seed', type=int, default=Config.SEED, show_default=True)
@click.option('--state-class', type=click.Choice(['general', 'product', 'separable_pfhs', 'separable_hdu']))
@click.option('--grain', type=float, default=Config.GRAIN, show_default=True, help='Granularidade das energias')
@click.option('--bins', type=int, default=Config.BINS, show_default=True)
@click.option('--out', default=Config.OUT, show_default=True, help='Diretório de saída')
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=Config.FORMAT, show_default=True)
@click.option('--threads', type=int, default=Config.THREADS, show_default=True)
@click.option('--kappa', type=float, default=math.pi / 8, show_default=True, help='Recurso inicial (cycles)')
@click.option('--eps', type=float, default=0.03, show_default=True, help='Erro do SWAP (cycles)')
@click.option('--iterations', type=int, default=20, show_default=True, help='Número de ciclos (cycles)')
@click.option('--sweep', help='Dimensões da varredura, ex.: 2x2,3x3,4x4')
@click.option('--phases/--no-phases', default=Config.PHASES, show_default=True,
              help='Fases aleatórias nos blocos de energia unidimensionais')
@click.option('--progress/--no-progress', default=True)
def run(experiment, d_b, d_c, samples, seed, state_class, grain, bins, out, fmt, threads,
        kappa, eps, iterations, sweep, phases, progress):
    """Executa um experimento e grava os resultados"""
    try:
        spec = build_spec(
            experiment, d_b, d_c, samples, seed, state_class, grain, bins, out, fmt, threads,
            kappa, eps, iterations, sweep=_parse_sweep(sweep), show_progress=progress, phases=phases,
        )
    except ValueError as e:
        logger.error(f"❌ Configuração inválida: {e}")
        return EXIT_USAGE

    try:
        files = ExperimentRunner(spec).run()
    except OSError as e:
        logger.error(f"❌ Erro de E/S: {e}")
        return EXIT_IO
    except TransportError as e:
        logger.error(f"❌ Falha na execução: {e}")
        return EXIT_RUNTIME
    except ValueError as e:
        logger.error(f"❌ Configuração inválida: {e}")
        return EXIT_USAGE

    for kind, path in files.items():
        click.echo(f"   📄 {kind}: {path}")
    return EXIT_OK


@cli.command()
@click.argument('path', type=click.Path(path_type=Path))
def summarize(path):
    """Imprime o resumo de um arquivo de resultados"""
    try:
        report = summarize_results(path)
    except OSError as e:
        logger.error(f"❌ Não foi possível ler {path}: {e}")
        return EXIT_IO
    except ResultsFormatError as e:
        logger.error(f"❌ {e}")
        return EXIT_RUNTIME
    print_summary(report)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Ponto de entrada: converte erros de uso do click no código 1"""
    try:
        code = cli.main(args=argv, prog_name='experiment_runner', standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    return code if isinstance(code, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
