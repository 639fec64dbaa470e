"""IPW Bernstein estimation of a response distribution function when
responses are missing at random given a discrete covariate."""

from ._bernmar import (
    BernsteinCdf,
    Dataset,
    DegreeGrid,
    EstimationError,
    InputError,
    IntegratedKde,
    KdeNormalization,
    bernstein_basis,
    bias_leading,
    c_correction,
    estimate_propensity,
    generate,
    ipw_ecdf,
    known_propensity,
    m_opt_global,
    m_opt_pointwise,
    nu2,
    read_csv,
    select_bandwidth,
    select_degree,
    sigma2,
    simulate,
    smooth,
    theory_model,
    variance_correction,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def estimate_cdf(data, propensity=None, degree=None, grid=None):
    """Smoothed IPW estimate of the response CDF.

    Uses the estimated cell propensities unless `propensity` is given, and
    picks the degree by least-squares cross-validation unless `degree` is.
    Returns the fitted curve and the degree used.
    """
    model = estimate_propensity(data) if propensity is None else propensity
    ecdf = ipw_ecdf(data, model)
    if degree is None:
        degree = select_degree(ecdf, grid if grid is not None else DegreeGrid()).selected
    return smooth(ecdf, degree), degree
