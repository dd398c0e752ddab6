"""
Общие фикстуры для тестов приложения ziber.

Фикстуры:
--------
- rng: детерминированный генератор numpy для случайных параметров
- fast_config: FitConfig с двумя рестартами для быстрых подгонок
- case1a_data: выборка сценария case1-A (n = 2000)
- write_csv: записывает pandas.DataFrame во временный CSV и возвращает путь
- dataset_csv: CSV-файл с выборкой case1-A (столбцы y, x, z)
- fish_csv: синтетический аналог данных о рыбалке (1000 строк)
"""

import numpy as np
import pandas as pd
import pytest

from ziber.estimation import FitConfig
from ziber.simulation import BUILTIN_SCENARIOS, fish_synthetic_frame, generate_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def fast_config():
    return FitConfig(n_restarts=2)


@pytest.fixture(scope='module')
def case1a_data():
    return generate_dataset(BUILTIN_SCENARIOS['case1-A'], 2000, seed=11)


@pytest.fixture
def write_csv(tmp_path):
    def write(frame, name='data.csv'):
        path = tmp_path / name
        frame.to_csv(path, index=False)
        return str(path)
    return write


@pytest.fixture
def dataset_csv(write_csv):
    data = generate_dataset(BUILTIN_SCENARIOS['case1-A'], 1000, seed=5)
    frame = pd.DataFrame({
        'y': data.y.astype(int),
        'x': data.x_raw[:, 0],
        'z': data.z_raw[:, 0].astype(int),
    })
    return write_csv(frame, 'case1a.csv')


@pytest.fixture
def fish_csv(write_csv):
    return write_csv(fish_synthetic_frame(n=1000), 'fish_synthetic.csv')
