"""
Gerenciador de resultados dos experimentos
Tabelas CSV/JSON sem perda de precisão, sidecar de metadados e curvas analíticas
"""

import json
import logging
import subprocess
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from transport import __version__
from transport.errors import ResultsFormatError
from transport.models import OutputFormat, RunMetadata

logger = logging.getLogger(__name__)

# 17 dígitos significativos: ida e volta exata para float64
FLOAT_FORMAT = '%.17g'
META_SUFFIX = '.meta.json'
OVERLAY_SUFFIX = '.overlay.csv'


def build_identifier() -> str:
    """Hash curto do git quando disponível, senão a versão do pacote"""
    try:
        result = subprocess.run(
            ['git', 'rev-parse', '--short', 'HEAD'],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if result.returncode == 0 and result.stdout.strip():
            return result.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"transport-{__version__}"


class ResultsManager:
    """
    Persistência dos resultados num diretório de saída.
    Arquivos de resultados são determinísticos; carimbos de tempo só no sidecar.
    """

    def __init__(self, out_dir: Union[str, Path], fmt: OutputFormat = 'csv'):
        if fmt not in ('csv', 'json'):
            raise ValueError(f"Formato desconhecido: {fmt}")
        self.out_dir = Path(out_dir)
        self.fmt = fmt

    def _ensure_dir(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def results_path(self, experiment: str) -> Path:
        return self.out_dir / f"{experiment}.{self.fmt}"

    def metadata_path(self, experiment: str) -> Path:
        return self.out_dir / f"{experiment}{META_SUFFIX}"

    def overlay_path(self, experiment: str) -> Path:
        return self.out_dir / f"{experiment}{OVERLAY_SUFFIX}"

    def save_records(self, experiment: str, rows: List[Dict[str, Any]], config: Dict[str, Any]) -> Path:
        """Grava a tabela de registros no formato configurado"""
        self._ensure_dir()
        path = self.results_path(experiment)

        if self.fmt == 'csv':
            pd.DataFrame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        else:
            payload = {'config': config, 'records': rows}
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(payload, f, indent=2, ensure_ascii=False, default=str)
                f.write('\n')

        logger.info(f"✅ {len(rows)} registros salvos em {path}")
        return path

    def save_overlay(self, experiment: str, rows: List[Dict[str, Any]]) -> Path:
        """Curvas analíticas (γ, cotas lineares, caudas de Levy) numa grade"""
        self._ensure_dir()
        path = self.overlay_path(experiment)
        pd.DataFrame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        logger.info(f"✅ Curvas analíticas salvas em {path}")
        return path

    def save_metadata(self, metadata: RunMetadata) -> Path:
        self._ensure_dir()
        path = self.metadata_path(metadata.experiment)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(metadata.model_dump_json(indent=2))
            f.write('\n')
        logger.info(f"✅ Metadados salvos em {path}")
        return path

    @staticmethod
    def load_records(path: Union[str, Path]) -> pd.DataFrame:
        """
        Lê uma tabela de resultados (CSV ou JSON, pela extensão).
        Arquivo vazio ou malformado gera ResultsFormatError.
        """
        path = Path(path)
        if path.suffix == '.json':
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    payload = json.load(f)
            except json.JSONDecodeError as e:
                raise ResultsFormatError(f"JSON malformado em {path}: {e}") from e
            records = payload.get('records') if isinstance(payload, dict) else None
            if not isinstance(records, list):
                raise ResultsFormatError(f"{path} não tem o array 'records'")
            df = pd.DataFrame(records)
        else:
            try:
                df = pd.read_csv(path, float_precision='round_trip')
            except pd.errors.EmptyDataError as e:
                raise ResultsFormatError(f"Arquivo vazio: {path}") from e
            except pd.errors.ParserError as e:
                raise ResultsFormatError(f"CSV malformado em {path}: {e}") from e

        if df.empty:
            raise ResultsFormatError(f"Nenhum registro em {path}")
        return df

    @staticmethod
    def load_config(path: Union[str, Path]) -> Optional[Dict[str, Any]]:
        """Objeto de configuração embutido num JSON de resultados"""
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f).get('config')

    @staticmethod
    def load_metadata(path: Union[str, Path]) -> RunMetadata:
        try:
            return RunMetadata.model_validate_json(Path(path).read_text(encoding='utf-8'))
        except ValueError as e:
            raise ResultsFormatError(f"Sidecar inválido em {path}: {e}") from e
