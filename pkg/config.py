import logging
import os
from dotenv import load_dotenv

# Carrega variáveis de ambiente
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = 'ERGOTRANSPORT_'
OUTPUT_FORMATS = ('csv', 'json')


def _env(name: str, default: str) -> str:
    return os.getenv(f'{ENV_PREFIX}{name}', default)


class Config:
    """Configurações centralizadas dos experimentos"""

    # Reprodutibilidade
    SEED = int(_env('SEED', '20240101'))

    # Amostragem
    SAMPLES = int(_env('SAMPLES', '10000'))
    GRAIN = float(_env('GRAIN', '0.2'))
    PFHS_MAX_ATTEMPTS = int(_env('PFHS_MAX_ATTEMPTS', '100000'))
    GAP_MAX_ATTEMPTS = int(_env('GAP_MAX_ATTEMPTS', '10000'))
    PHASES = _env('PHASES', 'false').lower() in ('1', 'true', 'yes')

    # Histogramas (1D, 2D e entropia condicional)
    BINS = int(_env('BINS', '100'))
    BINS_2D = int(_env('BINS_2D', '50'))
    BINS_ENTROPY = int(_env('BINS_ENTROPY', '20'))

    # Execução e saída
    THREADS = int(_env('THREADS', '1'))
    OUT = _env('OUT', 'results')
    FORMAT = _env('FORMAT', 'csv')
    LOG_LEVEL = _env('LOG_LEVEL', 'INFO')

    @classmethod
    def validate(cls):
        """Valida as configurações; registra cada chave inválida"""
        invalid = []

        if cls.GRAIN <= 0:
            invalid.append(('GRAIN', cls.GRAIN))
        if cls.THREADS < 1:
            invalid.append(('THREADS', cls.THREADS))
        if cls.SAMPLES < 1:
            invalid.append(('SAMPLES', cls.SAMPLES))
        if min(cls.BINS, cls.BINS_2D) < 1 or cls.BINS_ENTROPY < 2:
            invalid.append(('BINS', (cls.BINS, cls.BINS_2D, cls.BINS_ENTROPY)))
        if cls.FORMAT not in OUTPUT_FORMATS:
            invalid.append(('FORMAT', cls.FORMAT))
        if not 0 <= cls.SEED < 2 ** 64:
            invalid.append(('SEED', cls.SEED))

        if invalid:
            logger.error("❌ Configurações inválidas:")
            for key, value in invalid:
                logger.error(f"   {ENV_PREFIX}{key} = {value!r}")
            return False

        return True

    @classmethod
    def print_config(cls):
        """Imprime configurações atuais"""
        print("\n⚙️  CONFIGURAÇÕES ATUAIS:")
        print("=" * 40)
        print(f"   Seed: {cls.SEED}")
        print(f"   Amostras: {cls.SAMPLES}")
        print(f"   Granularidade: {cls.GRAIN}")
        print(f"   Bins 1D/2D/entropia: {cls.BINS}/{cls.BINS_2D}/{cls.BINS_ENTROPY}")
        print(f"   Tentativas PFHS/gap: {cls.PFHS_MAX_ATTEMPTS}/{cls.GAP_MAX_ATTEMPTS}")
        print(f"   Fases nos blocos 1D: {'sim' if cls.PHASES else 'não'}")
        print(f"   Threads: {cls.THREADS}")
        print(f"   Saída: {cls.OUT} ({cls.FORMAT})")
        print("=" * 40)
