"""Numerical laboratory for a quasilinear nonlocal short-wave/long-wave system.

A cubic Schrodinger short wave coupled to a real long wave transported at
the nonlocal speed a*int(v^2), on the half-line truncated to [0, L].  The
package evolves the coupled fields, verifies the discrete conservation
laws and virial identities, detects blow-up, studies the vanishing-
viscosity limit, and constructs the closed-form traveling bound states.
"""

from .core import (
    FieldShapeError,
    Grid,
    GridError,
    PhysParams,
    ddx,
    integrate,
    make_grid,
)
from .dynamics import (
    MINMOD2,
    UPWIND1,
    BoundaryValues,
    CFLViolationError,
    SimState,
    StepControl,
    cfl_dt,
    crank_nicolson,
    implicit_diffusion,
    nonlocal_speed,
    phase_rotation,
    schrodinger_step,
    step,
    transport_step,
    upwind_advect,
)
from .diagnostics import (
    DriftSummary,
    InvariantRecord,
    MonitorSample,
    MonitorStatus,
    MonitorThresholds,
    VirialMoments,
    VirialRecord,
    blowup_criterion,
    blowup_monitor,
    drift_summary,
    energy,
    grad_norm_sq,
    mass,
    momentum,
    second_difference,
    virial_moments,
    virial_rhs,
    viscous_balance,
    wall_flags,
)
from .boundstate import (
    BoundStateParams,
    ParameterError,
    alpha_integral,
    analytic_boundary,
    assemble_bound_state,
    kink,
    kink_profile,
    ode_energy,
    pde_residual,
    solve_parameters,
    w_profile,
)
from .experiments import (
    ConfigValidationError,
    RunReport,
    ScenarioConfig,
    convergence_study,
    generate_initial_data,
    run_scenario,
    viscosity_sweep,
)
from .presets import PRESETS, preset
from .storage import (
    CSV_HEADER,
    Snapshot,
    SnapshotFormatError,
    TimeSeriesFormatError,
    TimeSeriesRow,
    read_snapshot,
    read_timeseries,
    write_snapshot,
    write_timeseries,
)
from .io_cli import ConfigError, cli_main, load_config

__version__ = "0.1.0"
