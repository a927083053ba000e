"""Flat ``key = value`` experiment configuration.

Values are JSON literals (numbers, true/false, null, lists, quoted strings);
a bare word is read as a string. Each scenario accepts a fixed set of keys and
any other key is an error.
"""
import json
from dataclasses import dataclass, field

SCENARIOS = ("dynamics", "anneal", "sweep_omega", "sweep_ntrotter", "sweep_anharmonicity",
             "xyz_anneal", "xi_table", "estimates")

CONVENTIONS = ("rotation_angle", "main_text")

# key -> (type, description); types: int, float, bool, str, opt_float,
# int_list, float_list, or a tuple of allowed strings
KEYS = {
    "n_sites": ("int", "number of sites N"),
    "J": ("float", "XY coupling in units of |J| (sign matters)"),
    "hz": ("float", "transverse field h^z in units of |J|"),
    "omega": ("float", "drive angular frequency in units of |J|"),
    "periods": ("opt_float", "drive periods in t_final; overrides omega when set"),
    "n_periods": ("int", "stroboscopic periods to simulate"),
    "t_final": ("float", "anneal time in units of 1/|J|"),
    "substeps": ("int", "midpoint steps per drive period M"),
    "continuous_steps": ("int", "steps for the non-driven reference anneal"),
    "amplitude": ("opt_float", "drive amplitude; null means calibrated"),
    "amplitude_convention": (CONVENTIONS, "how to read amplitude: rotation angle chi or main-text lambda (chi = 2 lambda)"),
    "ramp_coupling": ("bool", "ramp the coupling on while the field ramps off"),
    "anharmonicity": ("opt_float", "transmon anharmonicity A in units of |J|; null means qubits"),
    "n_trotter": ("int", "number of Trotter steps"),
    "sampling": (("midpoint", "start", "end"), "where each Trotter step reads the schedule"),
    "layout": (("layered", "joint"), "bond layout of the digital Ising step"),
    "sizes": ("int_list", "chain lengths to sweep"),
    "periods_grid": ("float_list", "drive periods in t_final to sweep"),
    "ntrotter_grid": ("int_list", "Trotter step counts to sweep"),
    "anharmonicity_grid": ("float_list", "anharmonicities A to sweep, units of |J|"),
    "omega_grid": ("float_list", "drive frequencies searched for each A, units of |J|"),
    "eps_list": ("float_list", "per-gate errors for the digital comparator"),
    "c_gate": ("float", "gate time constant: t_gate = c_gate / A"),
    "ntrotter_max": ("int", "largest Trotter step count tabulated for the error budget"),
    "theta_e": ("float", "even-sublattice drive polar angle"),
    "phi_e": ("float", "even-sublattice drive azimuth"),
    "theta_o": ("float", "odd-sublattice drive polar angle"),
    "phi_o": ("float", "odd-sublattice drive azimuth"),
    "chi_e_grid": ("float_list", "even-sublattice rotation amplitudes"),
    "chi_o_grid": ("float_list", "odd-sublattice rotation amplitudes"),
    "cert_tol": ("float", "largest allowed change of reported numbers when M doubles"),
    "A_MHz": ("float", "anharmonicity A/2pi in MHz"),
    "omega_MHz": ("float", "drive frequency omega/2pi in MHz"),
    "J_MHz": ("float", "coupling |J|/2pi in MHz"),
    "J_sign": ("int", "sign of J (+1 or -1)"),
    "t_final_us": ("float", "anneal time in microseconds"),
    "lambda_value": ("float", "quoted drive amplitude, evaluated under both conventions"),
    "qubit_limit_A": ("float", "anharmonicity used for the qubit-limit run, units of |J|"),
    "eps": ("float", "per-gate error for the total-fidelity budget"),
}

_COMMON = {"n_sites": 4, "J": -1.0, "substeps": 256, "cert_tol": 1e-6}
_DRIVE = {"amplitude": None, "amplitude_convention": "rotation_angle"}
_ANNEAL = {"hz": 1.0, "t_final": 15.08, "ramp_coupling": True, "continuous_steps": 4000}

DEFAULTS = {
    "dynamics": {**_COMMON, **_DRIVE, "substeps": 4096, "hz": -1.5, "omega": 50.0, "n_periods": 20, "n_trotter": 20,
                 "layout": "layered"},
    "anneal": {**_COMMON, **_DRIVE, **_ANNEAL, "omega": 20.0, "periods": None, "anharmonicity": None,
               "n_trotter": 14, "sampling": "midpoint", "layout": "layered"},
    "sweep_omega": {**_COMMON, **_DRIVE, **_ANNEAL, "sizes": [4],
                    "periods_grid": [50.0, 100.0, 200.0, 400.0, 800.0, 1600.0]},
    "sweep_ntrotter": {**_COMMON, **_ANNEAL, "sizes": [4], "ntrotter_grid": [5, 10, 14, 20, 40, 80, 160, 320],
                       "sampling": "midpoint", "layout": "layered"},
    "sweep_anharmonicity": {**_COMMON, **_DRIVE, **_ANNEAL, "anharmonicity_grid": [150.0, 300.0, 600.0],
                            "omega_grid": [4.9, 9.8, 19.6], "eps_list": [1e-2, 1e-3, 1e-4, 1e-5],
                            "c_gate": 35.0, "ntrotter_max": 60, "sampling": "midpoint", "layout": "layered"},
    "xyz_anneal": {**_COMMON, **_ANNEAL, "amplitude": None, "amplitude_convention": "rotation_angle",
                   "t_final": 200.0, "periods": 954.0, "omega": 1.0, "n_trotter": 477, "sampling": "midpoint",
                   "continuous_steps": 20000},
    "xi_table": {"theta_e": 1.5707963267948966, "phi_e": 0.0, "theta_o": 1.5707963267948966, "phi_o": 0.0,
                 "chi_e_grid": [0.0], "chi_o_grid": [0.0]},
    "estimates": {"n_sites": 4, "J_sign": -1, "hz": 1.0, "A_MHz": 300.0, "omega_MHz": 9.8, "J_MHz": 1.0,
                  "t_final_us": 2.4, "lambda_value": 1.20241, "qubit_limit_A": 1e6, "substeps": 512,
                  "continuous_steps": 4000, "n_trotter": 14, "eps": 1e-4, "c_gate": 35.0,
                  "ramp_coupling": True, "sampling": "midpoint", "layout": "layered", "cert_tol": 1e-6},
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _check_value(key: str, value):
    kind = KEYS[key][0]
    path = f"config.{key}"
    is_num = isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(kind, tuple):
        if value not in kind:
            raise ConfigError(path, f"expected one of {list(kind)}, got {value!r}")
        return value
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if kind == "float" or (kind == "opt_float" and value is not None):
        if not is_num:
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if kind == "opt_float":
        return None
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true or false, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    if kind in ("int_list", "float_list"):
        if not isinstance(value, list) or not value:
            raise ConfigError(path, f"expected a non-empty list, got {value!r}")
        out = []
        for i, v in enumerate(value):
            ok = isinstance(v, int) and not isinstance(v, bool) if kind == "int_list" else (
                isinstance(v, (int, float)) and not isinstance(v, bool))
            if not ok:
                raise ConfigError(f"{path}[{i}]", f"bad list entry {v!r}")
            out.append(v if kind == "int_list" else float(v))
        return out
    raise AssertionError(kind)


def parse_value(text: str):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


@dataclass
class ExperimentConfig:
    scenario: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError("config.scenario", f"unknown scenario {self.scenario!r}; choose from {list(SCENARIOS)}")
        allowed = DEFAULTS[self.scenario]
        for key in self.params:
            if key not in allowed:
                raise ConfigError(f"config.{key}", f"unknown key for scenario {self.scenario!r}")
        self.params = {k: _check_value(k, v) for k, v in self.params.items()}

    @classmethod
    def from_text(cls, text: str, scenario: str | None = None) -> "ExperimentConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in values:
                raise ConfigError(f"config.{key}", f"duplicate key on line {lineno}")
            values[key] = parse_value(value)
        file_scenario = values.pop("scenario", None)
        if scenario is not None and file_scenario is not None and file_scenario != scenario:
            raise ConfigError("config.scenario", f"file says {file_scenario!r} but {scenario!r} was requested")
        name = scenario or file_scenario
        if name is None:
            raise ConfigError("config.scenario", "no scenario given")
        return cls(name, values)

    @classmethod
    def from_file(cls, path, scenario: str | None = None) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), scenario)

    def with_overrides(self, overrides) -> "ExperimentConfig":
        params = dict(self.params)
        for item in overrides or ():
            if "=" not in item:
                raise ConfigError("override", f"expected key=value, got {item!r}")
            key, value = item.split("=", 1)
            params[key.strip()] = parse_value(value)
        return ExperimentConfig(self.scenario, params)

    def resolved(self) -> dict:
        """All keys of the scenario with defaults filled in."""
        out = dict(DEFAULTS[self.scenario])
        out.update(self.params)
        return out

    def to_text(self) -> str:
        lines = [f"scenario = {json.dumps(self.scenario)}"]
        for key in DEFAULTS[self.scenario]:
            if key in self.params:
                lines.append(f"{key} = {json.dumps(self.params[key])}")
        return "\n".join(lines) + "\n"
