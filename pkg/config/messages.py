# config/messages.py
MESSAGES = {
    "app": {
        "description": "Two-terminal reliability of binary-state networks: exact enumeration, "
                       "crude Monte Carlo, BAT-MCS and cut-based cBAT-MCS.",
        "error": "reliacut {command}: {error}",
        "file_error": "reliacut {command}: cannot read input: {error}",
        "unexpected": "reliacut {command}: unexpected failure, see the log for details.",
        "no_command": "reliacut: no command given (try --help).",
    },
    "exact": {
        "help": "Exact reliability by full state enumeration.",
    },
    "cuts": {
        "help": "Layer decomposition, layer-cuts and the selected super-cut as JSON.",
    },
    "conditional": {
        "help": "Exact reliability with some arc states fixed.",
        "bad_fix": "--fix expects ARC=STATE with STATE 0 or 1, got '{value}'.",
    },
    "estimate": {
        "help": "Monte Carlo reliability estimate as JSON.",
    },
    "sample_size": {
        "help": "Trials needed for a relative error bound at a confidence level.",
    },
    "bench": {
        "help": "Repeated-run benchmark of several estimators.",
        "written": "Report written to {path} ({rows} row(s)).",
    },
    "gen_random": {
        "help": "Seeded random network with a connected source and sink.",
        "prob_required": "Either --prob or --prob-range is required.",
    },
}
