"""Structural model of digital-currency price formation, and a simulator.

The starting point is the quantity-theory equilibrium for a currency with
exogenous supply: with general price level P, real transaction volume Y,
velocity V and outstanding stock B, market clearing of money demand and
supply pins the currency price at

    P_B = P * Y / (V * B).

In logs this is linear with unit coefficients, which motivates the reduced
form actually estimated on data — the log price regressed on proxies for the
four fundamentals plus attractiveness and macro-financial indicators:

    p^B_t = b0 + b1 p_t + b2 y_t + b3 v_t + b4 b_t + b5 a_t + b6 m_t + e_t.

Theory restricts the fundamental signs: b1, b2 > 0 (a higher price level or
more transactions raise money demand) and b3, b4 < 0 (faster velocity or a
larger stock lower the price).  Attractiveness and macro terms carry no
theoretical sign restriction.

:func:`simulate_economy` generates a synthetic daily economy from this model:
latent log fundamentals follow random walks (the supply follows a concave
deterministic schedule, mimicking an asymptoting issuance rule), observable
proxy series are exponentiated latent states, and the log price is assembled
from the structural equation.  The output panel uses the same variable names
and level units as the observed data set, so it can be exported to CSV and
pushed through the full replication pipeline unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .series_store import Panel, panel_from_array
from .vecm import EffectTables

__all__ = [
    "BLOCKS",
    "EconomyState",
    "PriceRegressionSpec",
    "equilibrium_price",
    "simulate_economy",
    "SignEntry",
    "SignReport",
    "sign_expectation_check",
]

#: Variable blocks of the reduced-form regression and their proxy columns.
BLOCKS: dict[str, tuple[str, ...]] = {
    "fundamentals": ("totbc", "ntran", "naddu", "bcdde", "exrate"),
    "attractiveness": ("wiki_views", "new_members", "new_posts"),
    "macro": ("dj", "oil_price"),
}

#: Expected long-run effect signs on the price implied by the theory.
#: ``None`` means the theory does not restrict the sign.
EXPECTED_SIGNS: dict[str, str | None] = {
    "totbc": "-",
    "ntran": "+",
    "naddu": "+",
    "bcdde": "-",
    "exrate": None,
    "wiki_views": None,
    "new_members": None,
    "new_posts": None,
    "dj": None,
    "oil_price": None,
}


def equilibrium_price(
    price_level: float, economy_size: float, velocity: float, stock: float
) -> float:
    """Market-clearing currency price P*Y / (V*B)."""
    for label, value in (
        ("price_level", price_level),
        ("economy_size", economy_size),
        ("velocity", velocity),
        ("stock", stock),
    ):
        if not (math.isfinite(value) and value > 0.0):
            raise DataError(f"{label} must be positive and finite, got {value!r}")
    return price_level * economy_size / (velocity * stock)


@dataclass(frozen=True)
class EconomyState:
    """A point-in-time equilibrium of the model economy.

    Construction enforces the market-clearing identity
    ``bitcoin_price * stock == price_level * economy_size / velocity``.
    """

    price_level: float
    economy_size: float
    velocity: float
    stock: float
    bitcoin_price: float

    def __post_init__(self) -> None:
        implied = equilibrium_price(
            self.price_level, self.economy_size, self.velocity, self.stock
        )
        if not math.isclose(self.bitcoin_price, implied, rel_tol=1e-9):
            raise DataError(
                f"state violates the equilibrium identity: price "
                f"{self.bitcoin_price!r} vs implied {implied!r}"
            )

    @classmethod
    def equilibrium(
        cls, price_level: float, economy_size: float, velocity: float, stock: float
    ) -> "EconomyState":
        return cls(
            price_level=price_level,
            economy_size=economy_size,
            velocity=velocity,
            stock=stock,
            bitcoin_price=equilibrium_price(price_level, economy_size, velocity, stock),
        )


@dataclass(frozen=True)
class PriceRegressionSpec:
    """Structural coefficients (b0..b6) and simulation noise for the price equation.

    ``included_blocks`` controls both which proxy columns the simulator emits
    and which coefficients are allowed to be nonzero: excluding a block
    forces its slope coefficients to zero.
    """

    coefficients: tuple[float, float, float, float, float, float, float]
    included_blocks: frozenset[str] = frozenset(BLOCKS)
    noise_sd: float = 0.02

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "included_blocks", frozenset(self.included_blocks))
        if len(self.coefficients) != 7:
            raise DataError("price regression needs exactly 7 coefficients (b0..b6)")
        unknown = self.included_blocks - set(BLOCKS)
        if unknown:
            raise DataError(f"unknown blocks: {sorted(unknown)}")
        if self.noise_sd < 0.0:
            raise DataError("noise_sd must be nonnegative")
        slope_blocks = {
            "fundamentals": (1, 2, 3, 4),
            "attractiveness": (5,),
            "macro": (6,),
        }
        for block, idxs in slope_blocks.items():
            if block not in self.included_blocks:
                for i in idxs:
                    if self.coefficients[i] != 0.0:
                        raise DataError(
                            f"coefficient b{i} must be zero when block "
                            f"{block!r} is excluded"
                        )

    @classmethod
    def theory_consistent(
        cls,
        included_blocks: frozenset[str] | set[str] = frozenset(BLOCKS),
        noise_sd: float = 0.02,
        attractiveness: float = 0.5,
        macro: float = -0.2,
    ) -> "PriceRegressionSpec":
        """Unit fundamental coefficients with the theoretical signs."""
        blocks = frozenset(included_blocks)
        coefs = [0.0, 1.0, 1.0, -1.0, -1.0, 0.0, 0.0]
        if "fundamentals" not in blocks:
            coefs[1:5] = [0.0] * 4
        if "attractiveness" in blocks:
            coefs[5] = attractiveness
        if "macro" in blocks:
            coefs[6] = macro
        return cls(coefficients=tuple(coefs), included_blocks=blocks, noise_sd=noise_sd)


# Latent random-walk parameters (daily drift, innovation sd) and base levels
# for the observable proxies.  Scales only shift the log series by constants.
_LATENT = {
    "p": (0.0003, 0.006),
    "y": (0.0020, 0.020),
    "v": (0.0000, 0.015),
    "a": (0.0010, 0.030),
    "m": (0.0002, 0.010),
}
_BASE_LEVELS = {
    "exrate": 1.3,
    "ntran": 2.0e5,
    "naddu": 1.5e4,
    "bcdde": 2.5e5,
    "wiki_views": 3.0e4,
    "new_members": 1.2e3,
    "new_posts": 8.0e2,
    "dj": 1.3e4,
    "oil_price": 90.0,
}
_PROXY_NOISE_SD = {
    "naddu": 0.05,
    "new_members": 0.04,
    "new_posts": 0.04,
    "oil_price": 0.02,
}
_MAX_STOCK = 2.1e7
# Innovation sd of the stochastic wander of log supply around its schedule.
# The supply driver must carry a genuine stochastic trend (it is one of the
# I(1) inputs to the estimation pipeline), so the simulated stock is a random
# walk centred on the deterministic issuance schedule.
_SUPPLY_WANDER_SD = 0.005


def supply_schedule(t: int) -> np.ndarray:
    """Deterministic issuance schedule: stock levels with decreasing growth.

    Geometric approach toward the hard cap, so increments shrink every day
    and the schedule is concave and monotone increasing by construction.
    """
    tau = 2.0 * t
    t0 = 0.15 * tau
    idx = np.arange(t, dtype=float)
    return _MAX_STOCK * (1.0 - np.exp(-(idx + t0) / tau))


def _supply_log_stock(t: int, rule: str, rng: np.random.Generator | None = None) -> np.ndarray:
    if rule == "constant":
        return np.full(t, math.log(1.0e7))
    if rule == "fixed_schedule":
        log_schedule = np.log(supply_schedule(t))
        if rng is None:
            return log_schedule
        wander = np.cumsum(rng.normal(0.0, _SUPPLY_WANDER_SD, size=t))
        return log_schedule + wander
    raise DataError(f"unknown supply rule {rule!r}")


def simulate_economy(
    spec: PriceRegressionSpec,
    t: int,
    seed: int = 0,
    supply_rule: str = "fixed_schedule",
) -> Panel:
    """Simulate a synthetic daily economy of length ``t``.

    Returns a level panel whose first column is the currency price
    ``mkpru``, followed by the proxy columns of each included block in
    registry order.  Identical inputs produce identical output.
    """
    if t < 100:
        raise DataError(f"T too small for a meaningful simulation: {t} < 100")
    rng = np.random.default_rng(seed)

    latent: dict[str, np.ndarray] = {}
    for name, (drift, sd) in _LATENT.items():
        latent[name] = np.cumsum(rng.normal(drift, sd, size=t))
    latent["b"] = _supply_log_stock(t, supply_rule, rng)

    b0, b1, b2, b3, b4, b5, b6 = spec.coefficients
    log_price = (
        b0
        + b1 * latent["p"]
        + b2 * latent["y"]
        + b3 * latent["v"]
        + b4 * latent["b"]
        + b5 * latent["a"]
        + b6 * latent["m"]
    )
    if spec.noise_sd > 0.0:
        log_price = log_price + rng.normal(0.0, spec.noise_sd, size=t)

    def proxy(name: str, driver: np.ndarray) -> np.ndarray:
        log_level = math.log(_BASE_LEVELS[name]) + driver
        extra = _PROXY_NOISE_SD.get(name)
        if extra:
            log_level = log_level + rng.normal(0.0, extra, size=t)
        return np.exp(log_level)

    columns: dict[str, np.ndarray] = {"mkpru": np.exp(log_price)}
    if "fundamentals" in spec.included_blocks:
        columns["totbc"] = np.exp(latent["b"])
        columns["ntran"] = proxy("ntran", latent["y"])
        columns["naddu"] = proxy("naddu", latent["y"])
        columns["bcdde"] = proxy("bcdde", latent["v"])
        columns["exrate"] = proxy("exrate", latent["p"])
    if "attractiveness" in spec.included_blocks:
        columns["wiki_views"] = proxy("wiki_views", latent["a"])
        columns["new_members"] = proxy("new_members", latent["a"])
        columns["new_posts"] = proxy("new_posts", latent["a"])
    if "macro" in spec.included_blocks:
        columns["dj"] = proxy("dj", latent["m"])
        columns["oil_price"] = proxy("oil_price", latent["m"])

    # Registry order, price first.
    order = ["mkpru"] + [
        name for block in ("fundamentals", "attractiveness", "macro")
        for name in BLOCKS[block]
        if name in columns
    ]
    data = np.column_stack([columns[name] for name in order])
    return panel_from_array(data, variables=tuple(order))


@dataclass(frozen=True)
class SignEntry:
    variable: str
    effect: float
    expected: str | None
    verdict: str  # consistent | inconsistent | not_applicable

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "effect": self.effect,
            "expected": self.expected,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class SignReport:
    entries: tuple[SignEntry, ...] = field(default_factory=tuple)

    @property
    def all_consistent(self) -> bool:
        return all(e.verdict != "inconsistent" for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "all_consistent": self.all_consistent,
        }


def sign_expectation_check(tables: EffectTables) -> SignReport:
    """Compare estimated long-run effects against the theoretical signs.

    Variables without a theoretical restriction (attractiveness and macro
    blocks, and the exchange rate, whose direction the reduced form leaves
    open) are marked ``not_applicable``.
    """
    entries: list[SignEntry] = []
    for variable, cell in tables.long_run.items():
        if variable == "const":
            continue
        expected = EXPECTED_SIGNS.get(variable)
        if expected is None:
            verdict = "not_applicable"
        elif cell.value == 0.0:
            verdict = "inconsistent"
        elif (cell.value > 0.0) == (expected == "+"):
            verdict = "consistent"
        else:
            verdict = "inconsistent"
        entries.append(
            SignEntry(
                variable=variable,
                effect=cell.value,
                expected=expected,
                verdict=verdict,
            )
        )
    return SignReport(entries=tuple(entries))
