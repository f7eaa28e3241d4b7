//! Limit-theorem machinery for bandit play counts and regret: closed-form
//! SLLN/CLT predictors, the exact Thompson-sampling play probability by
//! Gauss-Hermite quadrature, coupling approximations with per-epoch sandwich
//! diagnostics, and an exact UCB play-time recursion check.

pub mod coupling;
pub mod lemmas;
pub mod predict;
pub mod quadrature;
pub mod recursion;

pub use coupling::{
    p_hat, p_hat_plus, p_tilde, p_tilde_minus, p_tilde_plus, sandwich_check, tau_first_passage,
    CouplingEpoch, CouplingError, CouplingReport, ViolationFractions,
};
pub use lemmas::{geometric_max_statistic, log_geometric_times_p, log_sum_exp, mills_bounds};
pub use predict::{
    clt_params, design_variance_for_exponent, slln_limit, tail_exponent, CltParams,
    LimitPrediction, PredictError,
};
pub use quadrature::{
    play_prob_closed_form, play_prob_exact, GaussHermite, PLAY_PROB_ABS_TOL, PLAY_PROB_NODES,
};
pub use recursion::{verify_ucb_recursion, RecursionEntry, RecursionError, UcbRecursionCheck};
