"""Taylor coefficients of the Riemann-Siegel kernel Psi about p = 1/2.

Generated by tools/gen_rs_tables.py; do not edit.
"""

PSI_TAYLOR = (
    3.8268343236508977173e-1,
    0.0,
    1.7489618723100817974,
    0.0,
    2.1180252076854963732,
    0.0,
    -8.7072166705114807392e-1,
    0.0,
    -3.4733112243465167073,
    0.0,
    -1.6626947308999324496,
    0.0,
    1.2167312889192321345,
    0.0,
    1.3014304161007975773,
    0.0,
    3.0511021827361672421e-2,
    0.0,
    -3.7558030515450952428e-1,
    0.0,
    -1.0857844165640659744e-1,
    0.0,
    5.1832902999549623376e-2,
    0.0,
    2.999948061990227592e-2,
    0.0,
    -2.275939670612564226e-3,
    0.0,
    -4.3826474165803383059e-3,
    0.0,
    -4.0642301837298469931e-4,
    0.0,
    4.0060977854221139279e-4,
    0.0,
    8.9710579913888412978e-5,
    0.0,
    -2.3025650027239107116e-5,
    0.0,
    -9.3800066019067924847e-6,
    0.0,
    6.3235149476091075042e-7,
    0.0,
    6.5510228192315016662e-7,
    0.0,
    2.2105237455526972587e-8,
    0.0,
    -3.322316176445628835e-8,
    0.0,
    -3.7349109899336560818e-9,
    0.0,
    1.2445067060797739195e-9,
    0.0,
    2.4768205376502191843e-10,
    0.0,
    -3.2842728168916271945e-11,
    0.0,
    -1.1305406852298403678e-11,
    0.0,
    4.5654639795886939276e-13,
    0.0,
    3.9598480945249215196e-13,
    0.0,
    7.8495662212596173171e-15,
    0.0,
    -1.1059043150991233194e-14,
    0.0,
    -7.7385439876415083171e-16,
    0.0,
    2.4857755550271372185e-16,
    0.0,
    3.051479718882721791e-17,
    0.0,
    -4.4142978877933028453e-18,
)
