"""This file contains suggestions on how to fix unknown ids and keys."""

from difflib import SequenceMatcher


def closest_match(candidate, options):
    """Return (ratio, option) for the option most similar to candidate."""
    matches = []
    for option in options:
        diff = SequenceMatcher(None, candidate, option)
        matches.append((diff.ratio(), option))
    return max(matches, key=lambda x: x[0])


def fix_unknown_id(entry_id, known_patterns):
    """Suggest the closest kernel or weight id."""
    family = entry_id.partition(":")[0]
    best_ratio, best_match = closest_match(family, known_patterns)
    message = [f"Unknown kernel or weight id '{entry_id}'."]
    if best_ratio > 0.5:
        message.append(f"Did you mean '{best_match}'?")
    else:
        message.append(f"Valid ids are: {', '.join(known_patterns)}")
    return " ".join(message)


def fix_unknown_function(expr, known_functions):
    """Suggest the closest function of the corpus."""
    best_ratio, best_match = closest_match(expr, known_functions)
    message = [f"Unknown function '{expr}'."]
    if best_ratio > 0.5:
        message.append(f"Did you mean '{best_match}'?")
    else:
        message.append(f"Valid functions are: {', '.join(known_functions)}")
    return " ".join(message)


def fix_config_key(key, permissible):
    """Find closest matching configuration key."""
    best_ratio, best_match = closest_match(key, permissible)
    message = [f"Invalid configuration key '{key}'."]
    if best_ratio > 0.5:
        message.append(f"Did you mean '{best_match}'?")
    return " ".join(message)
