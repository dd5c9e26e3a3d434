"""
File: config_helper.py
File-Path: src/helpers/config_helper.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    experiment configuration: INI sections [data] [synthetic] [similarity]
    [mfus] [gbt] [mapping] [experiment] with optional per-domain
    [similarity.target|auxiliary] and [mfus.target|auxiliary] overrides,
    section.key=value flag overrides, seed derivation and the effective
    config snapshot and hash

Inputs:
    config file path, override strings, named CLI flags

Outputs:
    ExperimentConfig, its JSON snapshot and config hash
"""

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

from core.gbt import GbtHyper
from core.mfus import MfusHyper
from core.similarity import DEFAULT_RATED_MAP, SimilarityParams
from dataset.splits import SplitSpec
from evaluation.synthetic import SyntheticSpec
from helpers.errors import ConfigError, UnknownMethodError
from helpers.random_helper import PRNG_ALGORITHM, derive_seed
from helpers.validation_helper import KNOWN_PROTOCOLS, validate_mapping, validate_methods

CONFIG_VERSION = "coldmap-config-v1"
DOMAINS = ('target', 'auxiliary')


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"{raw!r} is not a boolean")


def _strings(raw: str) -> Tuple[str, ...]:
    return tuple(token.strip() for token in raw.split(',') if token.strip())


def _floats(raw: str) -> Tuple[float, ...]:
    return tuple(float(token) for token in _strings(raw))


def _ints(raw: str) -> Tuple[int, ...]:
    return tuple(int(token) for token in _strings(raw))


def _optional_int(raw: str) -> Optional[int]:
    return None if raw.strip().lower() in ('', 'none') else int(raw)


def _optional_str(raw: str) -> Optional[str]:
    return raw.strip() or None


def _rated_map(raw: str) -> Dict[int, float]:
    """'1:1.0,2:0.8,...'"""
    pairs = {}
    for token in _strings(raw):
        rating, _, prob = token.partition(':')
        pairs[int(rating)] = float(prob)
    return pairs


SIMILARITY_KEYS = {
    'gamma1': float, 'gamma2': float, 'gamma3': float, 'sigma': float, 'base': float,
    'rho': _floats, 'high_rating_threshold': int, 'rated_map': _rated_map,
}
MFUS_KEYS = {
    'K': int, 'alpha': float, 'beta': float, 'max_outer_iters': int, 'tol': float,
    'ls_shrink': float, 'ls_c': float, 'init_scale': float, 'sim_floor': float,
}

SCHEMA: Dict[str, Dict[str, Callable]] = {
    'data': {
        'source': str, 'target': _optional_str, 'auxiliary': _optional_str, 'header': _bool,
        'min_user': int, 'min_item': int,
    },
    'synthetic': {
        'n_linked': int, 'n_cold': int, 'n_items_target': int, 'n_items_auxiliary': int,
        'K_true': int, 'cross_map': str, 'noise_sd': float, 'density': float, 'n_clusters': int,
    },
    'similarity': SIMILARITY_KEYS,
    'similarity.target': SIMILARITY_KEYS,
    'similarity.auxiliary': SIMILARITY_KEYS,
    'mfus': MFUS_KEYS,
    'mfus.target': MFUS_KEYS,
    'mfus.auxiliary': MFUS_KEYS,
    'gbt': {
        'nu': float, 'eta_policy': str, 'max_stages': int, 'tol': float,
        'max_depth': _optional_int, 'min_leaf': int,
    },
    'mapping': {
        'sim': float, 'fallback_k': int, 'clamp': _bool, 'ridge': float, 'intercept': _bool,
        'tmatrix_features': str,
    },
    'experiment': {
        'methods': _strings, 'protocol': str, 'seed': int, 'jobs': int, 'output_dir': str,
        'record_runs': _bool, 'cold_start_fraction': float, 'density_level': float,
        'overlap_level': float, 'cold_start_users': _strings, 'density_levels': _floats,
        'overlap_levels': _floats, 'sim_grid': _floats, 'grid_K': _ints, 'grid_alpha': _floats,
        'grid_beta': _floats, 'grid_rho_step': float, 'grid_rho_K': int, 'grid_rho_alpha': float,
        'grid_rho_beta': float, 'grid_train_fraction': float, 'grid_domain': str,
    },
}


@dataclass(frozen=True)
class DataConfig:
    source: str = 'files'
    target: Optional[str] = None
    auxiliary: Optional[str] = None
    header: bool = False
    min_user: int = 0
    min_item: int = 0


@dataclass(frozen=True)
class GridConfig:
    K: Tuple[int, ...] = (15, 20, 25)
    alpha: Tuple[float, ...] = (0.01,)
    beta: Tuple[float, ...] = (0.0, 0.001, 0.002, 0.005, 0.01)
    rho_step: float = 0.2
    rho_K: int = 20
    rho_alpha: float = 0.01
    rho_beta: float = 0.005
    train_fraction: float = 0.8
    domain: str = 'target'


@dataclass(frozen=True)
class ExperimentConfig:
    """every hyperparameter of a run, module seeds derived from seed"""
    data: DataConfig = field(default_factory=DataConfig)
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    split: SplitSpec = field(default_factory=SplitSpec)
    similarity_target: SimilarityParams = field(default_factory=SimilarityParams)
    similarity_auxiliary: SimilarityParams = field(default_factory=SimilarityParams)
    mfus_target: MfusHyper = field(default_factory=MfusHyper)
    mfus_auxiliary: MfusHyper = field(default_factory=MfusHyper)
    gbt: GbtHyper = field(default_factory=GbtHyper)
    sim: float = 0.45
    fallback_k: int = 50
    clamp: bool = False
    ridge: float = 1e-3
    intercept: bool = False
    tmatrix_features: str = 'mf'
    methods: Tuple[str, ...] = ('cdlfm',)
    protocol: str = 'single'
    density_levels: Tuple[float, ...] = (0.5, 0.7, 1.0)
    overlap_levels: Tuple[float, ...] = (0.3, 0.5, 0.7)
    sim_grid: Tuple[float, ...] = (0.2, 0.3, 0.4, 0.45, 0.5)
    grid: GridConfig = field(default_factory=GridConfig)
    output_dir: str = 'out'
    seed: int = 0
    jobs: int = 1
    record_runs: bool = False

    def __post_init__(self):
        errors = validate_mapping(self.sim, self.fallback_k)
        if self.protocol not in KNOWN_PROTOCOLS:
            errors['protocol'] = f"protocol must be one of {', '.join(KNOWN_PROTOCOLS)}"
        if self.data.source not in ('files', 'synthetic'):
            errors['data.source'] = "source must be files or synthetic"
        if self.tmatrix_features not in ('mf', 'mfus'):
            errors['tmatrix_features'] = "tmatrix_features must be mf or mfus"
        if self.ridge < 0:
            errors['ridge'] = "ridge must be >= 0"
        if self.jobs == 0:
            errors['jobs'] = "jobs must be nonzero"
        if self.grid.domain not in DOMAINS:
            errors['grid_domain'] = "grid_domain must be target or auxiliary"
        if not 0 < self.grid.train_fraction < 1:
            errors['grid_train_fraction'] = "grid_train_fraction must lie in (0, 1)"
        if errors:
            raise ConfigError(errors, module='config')
        method_errors = validate_methods(self.methods)
        if method_errors:
            raise UnknownMethodError(method_errors, module='config')

    def similarity_for(self, domain: str) -> SimilarityParams:
        return self.similarity_target if domain == 'target' else self.similarity_auxiliary

    def mfus_for(self, domain: str) -> MfusHyper:
        return self.mfus_target if domain == 'target' else self.mfus_auxiliary

    @property
    def density_seed(self) -> int:
        return derive_seed(self.seed, 'density')

    @property
    def grid_seed(self) -> int:
        return derive_seed(self.seed, 'grid')

    def snapshot(self) -> dict:
        """
        effective configuration as plain JSON-ready data

        jobs and output_dir are left out: results do not depend on them.
        """
        def params(p: SimilarityParams) -> dict:
            payload = asdict(p)
            payload['rated_map'] = {str(k): v for k, v in sorted(p.rated_map.items())}
            return payload

        return {
            'meta': {'version': CONFIG_VERSION, 'prng': PRNG_ALGORITHM},
            'data': asdict(self.data),
            'synthetic': asdict(self.synthetic),
            'split': asdict(self.split),
            'similarity.target': params(self.similarity_target),
            'similarity.auxiliary': params(self.similarity_auxiliary),
            'mfus.target': asdict(self.mfus_target),
            'mfus.auxiliary': asdict(self.mfus_auxiliary),
            'gbt': asdict(self.gbt),
            'mapping': {'sim': self.sim, 'fallback_k': self.fallback_k, 'clamp': self.clamp,
                        'ridge': self.ridge, 'intercept': self.intercept,
                        'tmatrix_features': self.tmatrix_features},
            'experiment': {'methods': list(self.methods), 'protocol': self.protocol,
                           'density_levels': list(self.density_levels),
                           'overlap_levels': list(self.overlap_levels),
                           'sim_grid': list(self.sim_grid),
                           'seed': self.seed, 'record_runs': self.record_runs},
            'grid': asdict(self.grid),
        }


def canonical_json(snapshot: Mapping) -> str:
    return json.dumps(snapshot, sort_keys=True, separators=(',', ':'), default=list)


def config_hash(snapshot: Mapping) -> str:
    """first 16 hex characters of sha256 over the canonical snapshot JSON"""
    return hashlib.sha256(canonical_json(snapshot).encode('utf-8')).hexdigest()[:16]


def parse_override(text: str) -> Tuple[str, str, str]:
    """'section.key=value' -> (section, key, value); section may itself contain a dot"""
    target, sep, value = text.partition('=')
    section, dot, key = target.strip().rpartition('.')
    if not sep or not dot or not section or not key:
        raise ConfigError({'override': f"expected section.key=value, got {text!r}"})
    if section not in SCHEMA:
        raise ConfigError({'override': f"unknown section {section!r}"})
    return section, key, value.strip()


def read_sections(path=None, overrides: Iterable[str] = ()) -> Dict[str, Dict[str, str]]:
    """raw string values per section, file first, overrides on top"""
    raw: Dict[str, Dict[str, str]] = {section: {} for section in SCHEMA}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        # keys keep their case, K is not k
        parser.optionxform = str
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        parser.read(path, encoding='utf-8')
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError({section: "unknown config section"})
            raw[section].update(parser[section])
    for text in overrides:
        section, key, value = parse_override(text)
        raw[section][key] = value
    return raw


def _typed(raw: Dict[str, Dict[str, str]]) -> Dict[str, dict]:
    errors = {}
    typed: Dict[str, dict] = {}
    for section, values in raw.items():
        schema = SCHEMA[section]
        typed[section] = {}
        for key, value in values.items():
            if key not in schema:
                errors[f"{section}.{key}"] = "unknown key"
                continue
            try:
                typed[section][key] = schema[key](value)
            except ValueError as error:
                errors[f"{section}.{key}"] = str(error)
    if errors:
        raise ConfigError(errors)
    return typed


def _renamed(values: dict, prefix: str) -> dict:
    return {key[len(prefix):]: value for key, value in values.items() if key.startswith(prefix)}


def build_config(typed: Dict[str, dict]) -> ExperimentConfig:
    """assembles the nested records, deriving every module seed from the master seed"""
    experiment = dict(typed['experiment'])
    seed = experiment.get('seed', 0)

    def seed_of(module: str) -> int:
        return derive_seed(seed, module)

    split = SplitSpec(**{key: experiment[key] for key in
                         ('cold_start_fraction', 'density_level', 'overlap_level', 'cold_start_users')
                         if key in experiment}, seed=seed_of('split'))

    def similarity(domain: str) -> SimilarityParams:
        values = {**typed['similarity'], **typed[f'similarity.{domain}']}
        values.setdefault('rated_map', dict(DEFAULT_RATED_MAP))
        return SimilarityParams(**values)

    def mfus(domain: str) -> MfusHyper:
        return MfusHyper(**{**typed['mfus'], **typed[f'mfus.{domain}']}, seed=seed_of(f'mfus_{domain}'))

    grid = GridConfig(**_renamed(experiment, 'grid_'))

    return ExperimentConfig(
        data=DataConfig(**typed['data']),
        synthetic=SyntheticSpec(**typed['synthetic'], seed=seed_of('synthetic')),
        split=split,
        similarity_target=similarity('target'),
        similarity_auxiliary=similarity('auxiliary'),
        mfus_target=mfus('target'),
        mfus_auxiliary=mfus('auxiliary'),
        gbt=GbtHyper(**typed['gbt'], seed=seed_of('gbt')),
        grid=grid,
        seed=seed,
        **typed['mapping'],
        **{key: value for key, value in experiment.items()
           if key in ('methods', 'protocol', 'jobs', 'output_dir', 'record_runs',
                      'density_levels', 'overlap_levels', 'sim_grid')},
    )


def load_config(path=None, overrides: Iterable[str] = (), seed: Optional[int] = None,
                jobs: Optional[int] = None, methods: Optional[Iterable[str]] = None,
                output_dir: Optional[str] = None, protocol: Optional[str] = None) -> ExperimentConfig:
    """
    file < --set overrides < named flags

    Args:
        path: INI file, or None for the defaults
        overrides: section.key=value strings
        seed, jobs, methods, output_dir, protocol: named CLI flags

    Returns:
        ExperimentConfig
    """
    raw = read_sections(path, overrides)
    named = {'seed': seed, 'jobs': jobs, 'output_dir': output_dir, 'protocol': protocol,
             'methods': ','.join(methods) if methods else None}
    for key, value in named.items():
        if value is not None:
            raw['experiment'][key] = str(value)
    return build_config(_typed(raw))
