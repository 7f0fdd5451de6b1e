#!/usr/bin/env python3
"""
Script para gerar relatórios sobre um diretório de resultados
"""

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List

# Adiciona o diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import Config
from experiment_runner import summarize_results
from results_manager import META_SUFFIX, ResultsManager
from transport.errors import ResultsFormatError

# Configurar logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


class ResultsReportGenerator:
    """Gerador de relatórios a partir dos sidecars e tabelas de um diretório"""

    def __init__(self, results_dir: Path, reports_dir: Path = Path("reports")):
        self.results_dir = Path(results_dir)
        self.reports_dir = Path(reports_dir)

    def collect(self) -> List[Dict[str, Any]]:
        """Um item por experimento: metadados mais o resumo da tabela"""
        entries = []
        for meta_path in sorted(self.results_dir.glob(f"*{META_SUFFIX}")):
            try:
                metadata = ResultsManager.load_metadata(meta_path)
                summary = summarize_results(Path(metadata.files['results']))
            except (ResultsFormatError, KeyError, OSError) as e:
                logger.warning(f"⚠️  Ignorando {meta_path.name}: {e}")
                continue
            entries.append({
                'experiment': metadata.experiment,
                'metadata': metadata.model_dump(mode='json'),
                'summary': summary.model_dump(mode='json'),
            })
        return entries

    def generate_console_report(self) -> bool:
        """Relatório rápido no console"""

        print("📊 TRANSPORTE DE ERGOTROPIA - RELATÓRIO GERAL")
        print("=" * 60)

        entries = self.collect()
        if not entries:
            print(f"❌ Nenhum experimento encontrado em {self.results_dir}")
            return False

        for entry in entries:
            meta, summary = entry['metadata'], entry['summary']
            print(f"\n🧪 {entry['experiment'].upper()}")
            print("-" * 30)
            print(f"🔖 Build: {meta['build_id']}  |  Seed: {meta['master_seed']}")
            print(f"⏱️  Tempo: {meta['wall_time_s']:.1f}s  |  Registros: {meta['n_records']}")
            print(f"📈 {summary['column']}: média {summary['mean']:.6g}, DP {summary['sd']:.6g}")
            print(f"   mín {summary['min']:.6g}, máx {summary['max']:.6g}")
            if summary['positive_fraction'] is not None:
                print(f"   Fração positiva: {summary['positive_fraction']:.4f}")
            if summary['bound_violations'] is not None:
                print(f"   Violações: {summary['bound_violations']}")

        print("\n✅ Relatório gerado com sucesso!")
        return True

    def generate_json_report(self) -> bool:
        """Relatório consolidado em JSON"""
        entries = self.collect()
        if not entries:
            print(f"❌ Nenhum experimento encontrado em {self.results_dir}")
            return False

        self.reports_dir.mkdir(exist_ok=True)
        json_file = self.reports_dir / f"ergotransport_report_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
        with open(json_file, 'w', encoding='utf-8') as f:
            json.dump(entries, f, indent=2, ensure_ascii=False, default=str)

        print(f"✅ Relatório JSON salvo: {json_file}")
        return True


def main(argv=None):
    """Função principal do script"""

    parser = argparse.ArgumentParser(description='Gerador de relatórios de experimentos')
    parser.add_argument('--results', default=Config.OUT, help='Diretório de resultados')
    parser.add_argument('--format', choices=['console', 'json'],
                        default='console', help='Formato do relatório')

    args = parser.parse_args(argv)

    if not Config.validate():
        print("❌ Configurações inválidas. Verifique as variáveis ERGOTRANSPORT_*")
        return False

    generator = ResultsReportGenerator(Path(args.results))

    if args.format == 'console':
        return generator.generate_console_report()
    return generator.generate_json_report()


if __name__ == "__main__":
    try:
        success = main()
        sys.exit(0 if success else 1)
    except KeyboardInterrupt:
        print("\n\n⏹️  Operação cancelada pelo usuário")
        sys.exit(1)
