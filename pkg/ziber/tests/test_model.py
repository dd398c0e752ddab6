"""
ZIBer - Тесты модели
====================

Проект: ZIBer regression toolkit
Технологии: numpy, scipy, pytest

Описание тестового модуля:
-------------------------
Тесты для Dataset, Beta, вероятности успеха, логарифма правдоподобия,
функции вклада (score) и наблюдаемой информации.

Тестовое покрытие:
-----------------
1. Dataset и Beta
   - Валидация откликов и размерностей
   - Дизайн-матрицы и столбцы Z в событийной части
   - Упаковка параметров и имена

2. Правдоподобие
   - Совпадение алгебраических форм с log p и log(1 - p)
   - Эталонное значение probit и инвариантность к перестановке строк
   - Невозможные наблюдения дают -inf

3. Score
   - Аналитический score против конечных разностей для всех связей
   - Замкнутая форма для logit против цепного правила
   - Несмещенность score в истинной точке
   - Ручной пример logit и конечность score при исчезающей omega

4. Наблюдаемая информация
   - Симметричность
   - Совпадение с X'WX для простой логистической модели
   - Квадратичная функция и вырожденность при одном наблюдении

Фикстуры:
--------
- rng: детерминированный генератор случайных чисел (conftest)
"""

import numpy as np
import pytest
from scipy import special

from ziber.exceptions import DimensionMismatchError, NonFiniteError
from ziber.links import LinkKind
from ziber.model import (
    Beta, Dataset, chain_rule_contributions, chain_rule_score, log_likelihood, logit_contributions,
    observed_information, per_observation_loglik, score, score_contributions, success_prob,
)
from ziber.simulation import BUILTIN_SCENARIOS, generate_dataset

ZIBER_LINKS = [LinkKind.LOGIT, LinkKind.PROBIT, LinkKind.CLOGLOG, LinkKind.GEV]


def random_instance(rng, link, sp_frozen=False):
    n = int(rng.integers(50, 201))
    data = Dataset(
        y=rng.binomial(1, 0.4, n),
        x_raw=rng.normal(size=(n, 2)),
        z_raw=np.column_stack([rng.binomial(1, 0.5, n), rng.normal(size=n)]),
    )
    eps = float(rng.uniform(-0.3, 0.3)) if link == LinkKind.GEV else None
    beta = Beta(
        gamma=rng.uniform(-0.3, 0.3, 3),
        eta=rng.uniform(-1.0, 1.0, 5),
        link=link,
        eps=eps,
        sp_frozen=sp_frozen,
    )
    return data, beta


def numeric_gradient(beta, data, h=1e-5):
    theta = beta.pack()
    gradient = np.empty_like(theta)
    for j in range(theta.size):
        step = np.zeros_like(theta)
        step[j] = h
        upper = log_likelihood(beta.replace_packed(theta + step), data)
        lower = log_likelihood(beta.replace_packed(theta - step), data)
        gradient[j] = (upper - lower) / (2 * h)
    return gradient


def test_dataset_validation():
    """
    Тест валидации Dataset.

    Проверяет:
    - отклик вне {0, 1} отклоняется
    - несовпадение числа строк дает DimensionMismatchError
    - NaN в ковариатах дает NonFiniteError
    """
    with pytest.raises(ValueError):
        Dataset(y=[0, 1, 2])
    with pytest.raises(DimensionMismatchError):
        Dataset(y=[0, 1, 1], x_raw=np.zeros((2, 1)))
    with pytest.raises(NonFiniteError):
        Dataset(y=[0, 1], z_raw=[[0.0], [np.nan]])
    with pytest.raises(DimensionMismatchError):
        Dataset(y=[0, 1], z_raw=[[0.0], [1.0]], event_z_columns=(3,))


def test_dataset_designs_and_labels():
    """
    Тест дизайн-матриц.

    Проверяет:
    - design_z = [1, Z], design_x = [1, X, Z[event columns]]
    - подписи столбцов
    - исходные массивы вызывающего кода не становятся read-only
    """
    x = np.array([[1.0], [2.0], [3.0]])
    z = np.array([[0.0, 5.0], [1.0, 6.0], [0.0, 7.0]])
    data = Dataset(y=[0, 1, 0], x_raw=x, z_raw=z, x_names=('age',), z_names=('bait', 'size'),
                   event_z_columns=(1,))
    np.testing.assert_array_equal(data.design_z, np.column_stack([np.ones(3), z]))
    np.testing.assert_array_equal(data.design_x, np.column_stack([np.ones(3), x, z[:, 1]]))
    assert data.sp_labels == ('Intercept', 'bait', 'size')
    assert data.event_labels == ('Intercept', 'age', 'size')
    assert (data.n, data.a, data.b) == (3, 1, 2)
    x[0, 0] = 10.0
    assert data.x_raw[0, 0] == 1.0


def test_beta_packing_and_names():
    """
    Тест упаковки параметров.

    Проверяет:
    - порядок (gamma, eta, eps) и имена
    - фиксированный eps не входит в вектор
    - эталонная модель без SP-части имеет пустой gamma
    """
    beta = Beta(gamma=[1.0, 2.0], eta=[3.0], link=LinkKind.GEV, eps=0.2)
    np.testing.assert_array_equal(beta.pack(), [1.0, 2.0, 3.0, 0.2])
    assert beta.names == ('gamma_0', 'gamma_1', 'eta_0', 'epsilon')
    assert beta.replace_packed([0.0, 0.0, 0.0, -0.1]).eps == -0.1

    fixed = Beta(gamma=[1.0, 2.0], eta=[3.0], link=LinkKind.GEV, eps=0.2, eps_fixed=True)
    assert fixed.k == 3
    assert fixed.replace_packed([0.0, 0.0, 0.0]).eps == 0.2

    plain = Beta(gamma=[9.0], eta=[1.0, 2.0], link=LinkKind.LOGIT, sp_frozen=True)
    assert plain.k == 2
    assert plain.names == ('eta_0', 'eta_1')

    with pytest.raises(ValueError):
        Beta(gamma=[0.0], eta=[0.0], link=LinkKind.GEV)
    with pytest.raises(DimensionMismatchError):
        beta.replace_packed([0.0, 0.0])


def test_success_prob_at_zero_parameters():
    """
    Тест вероятности успеха.

    Проверяет:
    - при нулевых параметрах logit-ZIBer p = 0.5 * 0.5
    - omega = 1 в эталонной модели
    """
    data = Dataset(y=[0, 1], x_raw=[[0.3], [-1.0]], z_raw=[[1.0], [0.0]])
    beta = Beta.zeros(data, LinkKind.LOGIT)
    evaluation = success_prob(beta, data.design_x, data.design_z)
    np.testing.assert_allclose(evaluation.p, 0.25)

    plain = Beta.zeros(data, LinkKind.PROBIT, sp_frozen=True)
    evaluation = success_prob(plain, data.design_x, data.design_z)
    np.testing.assert_array_equal(evaluation.omega, 1.0)
    np.testing.assert_allclose(evaluation.p, 0.5)


def test_probit_success_prob_golden_value():
    """
    Тест эталонного значения probit.

    Проверяет:
    - gamma = (-0.8, 0.9), Z = 1, eta'X = 0.7: p = Phi(0.1) * H(0.7)
    - совпадение с 0.3607063599445 до 1e-12 и с произведением scipy
    """
    data = Dataset(y=[1], z_raw=[[1.0]])
    beta = Beta(gamma=[-0.8, 0.9], eta=[-0.2, 0.9], link=LinkKind.PROBIT)
    p = success_prob(beta, data.design_x, data.design_z).p[0]
    assert p == pytest.approx(0.3607063599445, abs=1e-12)
    assert p == pytest.approx(special.ndtr(0.1) * special.expit(0.7), rel=1e-13)


@pytest.mark.parametrize('link', ZIBER_LINKS)
def test_loglik_is_permutation_invariant(rng, link):
    """
    Тест перестановки наблюдений.

    Проверяет:
    - перестановка строк выборки не меняет l (до ошибки суммирования)
    """
    data, beta = random_instance(rng, link)
    order = rng.permutation(data.n)
    shuffled = Dataset(y=data.y[order], x_raw=data.x_raw[order], z_raw=data.z_raw[order])
    assert log_likelihood(beta, shuffled) == pytest.approx(log_likelihood(beta, data), rel=1e-12)


@pytest.mark.parametrize('link', ZIBER_LINKS)
def test_loglik_forms_agree_with_mixture_probability(rng, link):
    """
    Тест алгебраических форм правдоподобия.

    Проверяет:
    - per_observation_loglik = y log p + (1 - y) log(1 - p)
    """
    data, beta = random_instance(rng, link)
    p = success_prob(beta, data.design_x, data.design_z).p
    expected = np.where(data.y == 1, np.log(p), np.log1p(-p))
    np.testing.assert_allclose(per_observation_loglik(beta, data), expected, rtol=1e-10, atol=1e-12)


def test_plain_baseline_loglik(rng):
    """
    Тест эталонной модели.

    Проверяет:
    - plain-logit: l_i = y log H(b) + (1 - y) log H(-b)
    """
    data, beta = random_instance(rng, LinkKind.LOGIT, sp_frozen=True)
    event = data.design_x @ beta.eta
    expected = np.where(data.y == 1, special.log_expit(event), special.log_expit(-event))
    np.testing.assert_allclose(per_observation_loglik(beta, data), expected, rtol=1e-12)


def test_impossible_observation_gives_minus_infinity():
    """
    Тест невозможного наблюдения.

    Проверяет:
    - omega = 0 (вне носителя GEV) и y = 1 дают l = -inf
    - score в такой точке отклоняется с NonFiniteError
    """
    data = Dataset(y=[1, 0])
    beta = Beta(gamma=[-5.0], eta=[0.0], link=LinkKind.GEV, eps=-0.5)
    assert log_likelihood(beta, data) == -np.inf
    with pytest.raises(NonFiniteError):
        score(beta, data)


@pytest.mark.parametrize('link', ZIBER_LINKS)
def test_score_matches_finite_differences(rng, link):
    """
    Тест корректности градиента.

    Проверяет:
    - для 100 случайных пар (beta, выборка n <= 200) аналитический score
      совпадает с центральными разностями l с относительной ошибкой <= 1e-6
    """
    for _ in range(100):
        data, beta = random_instance(rng, link)
        analytic = score(beta, data)
        numeric = numeric_gradient(beta, data)
        scale = max(1.0, np.max(np.abs(numeric)))
        assert np.max(np.abs(analytic - numeric)) <= 1e-6 * scale


def test_logit_score_worked_example():
    """
    Тест ручного примера score.

    Проверяет:
    - одно наблюдение y = 1, Z = 1, нулевые параметры logit-ZIBer:
      блок gamma равен 0.5 * (1, 1), блок eta тоже 0.5 * (1, 1)
    """
    data = Dataset(y=[1], z_raw=[[1.0]])
    beta = Beta.zeros(data, LinkKind.LOGIT)
    gradient = score(beta, data)
    np.testing.assert_allclose(gradient[:2], [0.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(gradient[2:], [0.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(chain_rule_score(beta, data), gradient, atol=1e-14)


@pytest.mark.parametrize('link,gamma', [
    (LinkKind.CLOGLOG, [1.0, 2.0]),
    (LinkKind.PROBIT, [0.0, 10.0]),
])
def test_score_is_finite_when_omega_underflows(link, gamma):
    """
    Тест score при исчезающей omega.

    Проверяет:
    - y = 1 при gamma'Z = -7 (cloglog) или -40 (probit): omega = 0 в
      двойной точности, но l конечен
    - score конечен и совпадает с центральными разностями
    """
    # Первое наблюдение лежит глубоко в хвосте связи
    data = Dataset(y=[1, 0, 1], z_raw=[[-4.0], [0.0], [1.0]])
    beta = Beta(gamma=gamma, eta=[0.0, 0.0], link=link)
    assert np.isfinite(log_likelihood(beta, data))
    analytic = score(beta, data)
    assert np.all(np.isfinite(analytic))
    numeric = numeric_gradient(beta, data)
    scale = max(1.0, np.max(np.abs(numeric)))
    assert np.max(np.abs(analytic - numeric)) <= 1e-6 * scale


@pytest.mark.parametrize('link', [LinkKind.LOGIT, LinkKind.PROBIT])
def test_plain_score_matches_finite_differences(rng, link):
    """
    Тест градиента эталонных моделей.

    Проверяет:
    - score plain-logit и plain-probit совпадает с разностями
    """
    for _ in range(10):
        data, beta = random_instance(rng, link, sp_frozen=True)
        numeric = numeric_gradient(beta, data)
        scale = max(1.0, np.max(np.abs(numeric)))
        assert np.max(np.abs(score(beta, data) - numeric)) <= 1e-6 * scale


def test_logit_closed_form_equals_chain_rule(rng):
    """
    Тест замкнутой формы logit-score.

    Проверяет:
    - на 100 случайных примерах замкнутая форма совпадает с цепным правилом до 1e-10
    - score_contributions выбирает замкнутую форму для logit
    """
    for _ in range(100):
        data, beta = random_instance(rng, LinkKind.LOGIT)
        closed = logit_contributions(beta, data).sum(axis=0)
        generic = chain_rule_score(beta, data)
        assert np.max(np.abs(closed - generic)) <= 1e-10 * max(1.0, np.max(np.abs(generic)))
    np.testing.assert_array_equal(score_contributions(beta, data), logit_contributions(beta, data))
    with pytest.raises(ValueError):
        logit_contributions(Beta.zeros(data, LinkKind.PROBIT), data)


def test_score_is_unbiased_at_truth():
    """
    Тест несмещенности score.

    Проверяет:
    - в истинной точке case1-A средний вклад по 10 000 наблюдений
      отличается от 0 не более чем на 4 стандартные ошибки Монте-Карло
    """
    scenario = BUILTIN_SCENARIOS['case1-A']
    data = generate_dataset(scenario, 10_000, seed=3)
    contributions = chain_rule_contributions(scenario.true_beta, data)
    means = contributions.mean(axis=0)
    standard_errors = contributions.std(axis=0, ddof=1) / np.sqrt(data.n)
    assert np.all(np.abs(means) <= 4 * standard_errors)


def test_observed_information_of_plain_logit():
    """
    Тест наблюдаемой информации.

    Проверяет:
    - симметричность
    - для plain-logit совпадение с X' diag(h(1 - h)) X
    """
    rng = np.random.default_rng(7)
    data, beta = random_instance(rng, LinkKind.LOGIT, sp_frozen=True)
    information = observed_information(beta, data)
    np.testing.assert_array_equal(information, information.T)
    h = special.expit(data.design_x @ beta.eta)
    expected = data.design_x.T @ (data.design_x * (h * (1 - h))[:, None])
    np.testing.assert_allclose(information, expected, rtol=1e-6, atol=1e-6)


def test_observed_information_of_concave_quadratic():
    """
    Тест численной информации на квадратичной функции.

    Проверяет:
    - для l = -0.5 beta'A beta с градиентом -A beta результат равен A до 1e-6
    """
    matrix = np.array([
        [4.0, 1.0, 0.5, 0.0],
        [1.0, 3.0, 0.2, 0.1],
        [0.5, 0.2, 2.0, 0.3],
        [0.0, 0.1, 0.3, 1.0],
    ])
    beta = Beta(gamma=[0.3, -0.2], eta=[0.1, 0.5], link=LinkKind.LOGIT)
    information = observed_information(beta, gradient=lambda theta: -matrix @ theta)
    np.testing.assert_allclose(information, matrix, atol=1e-6)


def test_single_observation_information_is_rank_deficient():
    """
    Тест вырожденной информации.

    Проверяет:
    - одно наблюдение не определяет 4 параметра: наименьшее по модулю
      собственное число <= 1e-8 * наибольшего
    """
    data = Dataset(y=[1], z_raw=[[1.0]])
    beta = Beta(gamma=[0.2, -0.1], eta=[0.3, 0.4], link=LinkKind.LOGIT)
    values = np.abs(np.linalg.eigvalsh(observed_information(beta, data)))
    assert values.min() <= 1e-8 * values.max()
