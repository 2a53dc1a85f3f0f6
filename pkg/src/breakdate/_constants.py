"""Generated by scripts/gen_constants.py; do not edit by hand."""

# sup-Wald: 1000000 paths (p=1), 200000 (p=2,3), 10000-point grid, seed 20240601

BAI_QUANTILES = {
    0.95: 7.687275546291291,
    0.975: 11.03329244540936,
    0.995: 19.76652897092559,
}

SUPW_CRITICAL = {
    (1, 0.05, 0.01): 13.3556,
    (1, 0.05, 0.05): 9.8128,
    (1, 0.05, 0.1): 8.2318,
    (1, 0.1, 0.01): 12.7868,
    (1, 0.1, 0.05): 9.2484,
    (1, 0.1, 0.1): 7.6716,
    (1, 0.15, 0.01): 12.3261,
    (1, 0.15, 0.05): 8.7951,
    (1, 0.15, 0.1): 7.2337,
    (1, 0.2, 0.01): 11.9072,
    (1, 0.2, 0.05): 8.3854,
    (1, 0.2, 0.1): 6.8316,
    (1, 0.25, 0.01): 11.4883,
    (1, 0.25, 0.05): 7.9755,
    (1, 0.25, 0.1): 6.4432,
    (2, 0.05, 0.01): 16.671,
    (2, 0.05, 0.05): 12.8722,
    (2, 0.05, 0.1): 11.1454,
    (2, 0.1, 0.01): 16.0839,
    (2, 0.1, 0.05): 12.2519,
    (2, 0.1, 0.1): 10.5356,
    (2, 0.15, 0.01): 15.6359,
    (2, 0.15, 0.05): 11.7865,
    (2, 0.15, 0.1): 10.0532,
    (2, 0.2, 0.01): 15.1707,
    (2, 0.2, 0.05): 11.3253,
    (2, 0.2, 0.1): 9.6114,
    (2, 0.25, 0.01): 14.6988,
    (2, 0.25, 0.05): 10.8869,
    (2, 0.25, 0.1): 9.1738,
    (3, 0.05, 0.01): 19.4811,
    (3, 0.05, 0.05): 15.4175,
    (3, 0.05, 0.1): 13.5922,
    (3, 0.1, 0.01): 18.8272,
    (3, 0.1, 0.05): 14.7569,
    (3, 0.1, 0.1): 12.9238,
    (3, 0.15, 0.01): 18.3056,
    (3, 0.15, 0.05): 14.2458,
    (3, 0.15, 0.1): 12.4032,
    (3, 0.2, 0.01): 17.8126,
    (3, 0.2, 0.05): 13.7645,
    (3, 0.2, 0.1): 11.9101,
    (3, 0.25, 0.01): 17.3138,
    (3, 0.25, 0.05): 13.2854,
    (3, 0.25, 0.1): 11.4201,
}
