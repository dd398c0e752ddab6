"""
ZIBer - Тесты выбора модели
===========================

Проект: ZIBer regression toolkit
Технологии: numpy, pytest

Описание тестового модуля:
-------------------------
Тесты статистики Вуонга для сравнения двух подгонок на одних и тех же
наблюдениях.

Тестовое покрытие:
-----------------
1. vuong_statistic
   - Ручной пример
   - Антисимметричность и инвариантность к сдвигу
   - Вырожденные случаи (нулевая дисперсия)
   - Несовпадение длин

2. Решение
   - Пороги 1.96 и -1.96
   - ZIBer против plain-logit на данных ZIBer
   - probit-ZIBer против plain-probit на синтетических данных о рыбалке
   - logit и cloglog совпадают при бинарном Z
"""

import math

import numpy as np
import pytest

from ziber.estimation import fit_model
from ziber.exceptions import DegenerateVuongError, DimensionMismatchError
from ziber.selection import VuongPreference, preference, vuong, vuong_statistic
from ziber.simulation import fish_scenario, generate_dataset


def test_vuong_hand_example():
    """
    Тест ручного примера.

    Проверяет:
    - m = (1, 0, -1, 2): mean = 0.5, sd = 1.2910, V = 0.7746
    - решение Indeterminate, p-value около 0.4386
    """
    result = vuong_statistic([1.0, 0.0, -1.0, 2.0], [0.0, 0.0, 0.0, 0.0])
    assert result.n == 4
    assert result.mean_lr == pytest.approx(0.5)
    assert result.sd_lr == pytest.approx(math.sqrt(5.0 / 3.0))
    assert result.statistic == pytest.approx(2.0 * 0.5 / math.sqrt(5.0 / 3.0), abs=1e-10)
    assert result.preferred == VuongPreference.INDETERMINATE
    assert result.p_value == pytest.approx(0.4386, abs=1e-4)


def test_vuong_antisymmetry_and_shift_invariance():
    """
    Тест свойств статистики.

    Проверяет:
    - V(a, b) = -V(b, a)
    - добавление одной константы к обоим векторам не меняет V
    """
    rng = np.random.default_rng(5)
    loglik_a = -rng.exponential(size=300)
    loglik_b = -rng.exponential(size=300)
    forward = vuong_statistic(loglik_a, loglik_b)
    backward = vuong_statistic(loglik_b, loglik_a)
    assert forward.statistic == -backward.statistic
    shifted = vuong_statistic(loglik_a - 3.0, loglik_b - 3.0)
    assert shifted.statistic == pytest.approx(forward.statistic, abs=1e-10)


def test_identical_models_give_zero():
    """
    Тест одинаковых моделей.

    Проверяет:
    - одинаковые векторы: V = 0, Indeterminate
    """
    loglik = np.log(np.linspace(0.1, 0.9, 9))
    result = vuong_statistic(loglik, loglik)
    assert result.statistic == 0.0
    assert result.preferred == VuongPreference.INDETERMINATE
    assert result.p_value == 1.0


def test_constant_nonzero_ratio_is_degenerate():
    """
    Тест вырожденного отношения.

    Проверяет:
    - постоянное ненулевое отношение дает DegenerateVuongError
    """
    with pytest.raises(DegenerateVuongError):
        vuong_statistic([-1.0, -2.0, -3.0], [-1.5, -2.5, -3.5])


def test_length_checks():
    """
    Тест длин.

    Проверяет:
    - разная длина и n < 2 дают DimensionMismatchError
    """
    with pytest.raises(DimensionMismatchError):
        vuong_statistic([0.0, 1.0], [0.0, 1.0, 2.0])
    with pytest.raises(DimensionMismatchError):
        vuong_statistic([0.0], [0.0])


@pytest.mark.parametrize('statistic,expected', [
    (1.97, VuongPreference.MODEL_A),
    (1.96, VuongPreference.INDETERMINATE),
    (-1.96, VuongPreference.INDETERMINATE),
    (-2.5, VuongPreference.MODEL_B),
])
def test_preference_thresholds(statistic, expected):
    """
    Тест порогов решения.

    Проверяет:
    - строгое сравнение с 1.96 в обе стороны
    """
    assert preference(statistic) == expected


def test_vuong_prefers_ziber_on_zero_inflated_data(case1a_data, fast_config):
    """
    Тест направленности.

    Проверяет:
    - на данных case1-A (n = 2000) ZIBer-logit лучше plain-logit: V > 0
    - проверка числа наблюдений в vuong
    """
    ziber = fit_model(case1a_data, 'logit', fast_config)
    plain = fit_model(case1a_data, 'plain-logit', fast_config)
    result = vuong(ziber, plain, n=case1a_data.n)
    assert result.statistic > 0
    assert result.n == case1a_data.n
    with pytest.raises(DimensionMismatchError):
        vuong(ziber, plain, n=10)


def test_probit_ziber_beats_plain_probit_on_fish_stand_in(fast_config):
    """
    Тест на синтетических данных о рыбалке.

    Проверяет:
    - probit-ZIBer лучше plain-probit на данных, сгенерированных probit-ZIBer
    """
    data = generate_dataset(fish_scenario(), 1000, seed=248)
    ziber = fit_model(data, 'probit', fast_config)
    plain = fit_model(data, 'plain-probit', fast_config)
    assert vuong(ziber, plain).statistic > 0


def test_sp_links_coincide_with_binary_z(case1a_data, fast_config):
    """
    Тест неразличимости связей при бинарном Z.

    Проверяет:
    - на case1-A (Z в {0, 1}) logit-ZIBer и cloglog-ZIBer дают один и тот же
      максимум l и одинаковые вклады наблюдений
    - поэтому знак V между ними не несет информации о связи
    """
    logit = fit_model(case1a_data, 'logit', fast_config)
    cloglog = fit_model(case1a_data, 'cloglog', fast_config)
    assert logit.converged and cloglog.converged
    assert cloglog.loglik == pytest.approx(logit.loglik, abs=1e-5)
    np.testing.assert_allclose(cloglog.per_obs_loglik, logit.per_obs_loglik, atol=1e-5)
