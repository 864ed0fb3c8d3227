"""Frozen reference values at the study case; generated by derive_reference_values.py."""

STUDY_CASE = {
    "DNPC": {
        "S1": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.2165980810221055),
        "S2": (1.4988855013626192, 0.057812228852811081, 0.14625, 0.0081417165387200581),
        "S3": (1.4988855013626192, 0.057812228852811081, 0.14625, 0.0081417165387200581),
        "S4": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.2165980810221055),
        "S5": (0.0, 1.019854951753146, 0.067606767970001758, 0.0),
        "S6": (0.0, 1.019854951753146, 0.067606767970001758, 0.0),
    },
    "ANPC_SSCM": {
        "S1": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.2165980810221055),
        "S2": (1.4859140847801191, 0.20508372108010176, 0.14625, 0.0),
        "S3": (1.4859140847801191, 0.20508372108010176, 0.14625, 0.0),
        "S4": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.2165980810221055),
        "S5": (0.19676655927044914, 1.0006932815644764, 0.067606767970001758, 0.0081417165387200581),
        "S6": (0.19676655927044914, 1.0006932815644764, 0.067606767970001758, 0.0081417165387200581),
    },
    "ANPC_OSCM": {
        "S1": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.0),
        "S2": (1.115916978285925, 1.002361859596229, 0.14625, 0.22473979756082556),
        "S3": (1.115916978285925, 1.002361859596229, 0.14625, 0.22473979756082556),
        "S4": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.0),
        "S5": (1.0006932815644764, 0.19676655927044914, 0.067606767970001758, 0.0),
        "S6": (1.0006932815644764, 0.19676655927044914, 0.067606767970001758, 0.0),
    },
    "ANPC_FPCM": {
        "S1": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.2165980810221055),
        "S2": (1.2110242170301597, 0.51319419760825698, 0.11244661601499912, 0.0033354111461382804),
        "S3": (1.2110242170301597, 0.51319419760825698, 0.11244661601499912, 0.0033354111461382804),
        "S4": (1.0984323482034105, 0.057812228852811081, 0.078643232029998242, 0.2165980810221055),
        "S5": (0.50992747587657298, 0.50992747587657298, 0.033803383985000879, 0.0033354111461382804),
        "S6": (0.50992747587657298, 0.50992747587657298, 0.033803383985000879, 0.0033354111461382804),
    },
}

# anchors: I_p = 1, m = 1
DNPC_S1F_PHI0 = 0.46065886596178064  # sqrt(2 / (3 pi))
DNPC_S1F_PHI90 = 0.23032943298089032  # sqrt(1 / (6 pi))
