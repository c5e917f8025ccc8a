"""Distortion riskmetrics, inf-convolutions, and risk-sharing allocations."""

from .allocation import (
    Composition,
    CounterMonotonicForm,
    DiscreteAllocation,
    JackpotAllocation,
    constant_share,
    countermonotonic_form,
    jackpot_allocation,
    pairwise_countermonotonic_check,
)
from .convolution import (
    ConvolutionResult,
    grid_convolve,
    inf_convolve,
    normalized_sup_dual,
    sup_convolve,
)
from .distortion import (
    DistortionCurve,
    DualPower,
    EsCap,
    GridFunction,
    Identity,
    PiecewiseLinear,
    Power,
    Sampled,
    VarIndicator,
    bernstein,
    classify,
    combine,
    dual,
    eval_curve,
    is_dually_subadditive,
)
from .errors import (
    ConeError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    NotRepresentableError,
    RegimeError,
    RiskshareError,
    ShapeError,
)
from .infconv import (
    ShareResult,
    comonotonic_infconv,
    countermonotonic_infconv,
    divergence_certificate,
    unconstrained_infconv,
)
from .measures import Discrete, LogNormal, Pareto, Uniform, es, negate, riskmetric, var
from .oracle import convex_order_leq, oracle_constant_share, oracle_levelwise
from .portfolio import CostFunction, PortfolioSolution, crossing_points, optimal_lambda, quadratic_cost

__version__ = "0.1.0"
