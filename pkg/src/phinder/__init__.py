"""Phish Phinder: a phishing-awareness game.

A deterministic engine serves classification challenges ("worms") built by
mutating a validated-clean corpus; an explainable rule detector grades them
and voices Shifu's advice; a session service exposes it all to the browser.
"""

from .detector import (
    Brand,
    BrandDirectory,
    RuleConfig,
    advice_for,
    default_brand_directory,
    default_rule_config,
    detect,
)
from .engine import (
    Feedback,
    GameSession,
    GameState,
    Phase,
    PlayerAction,
    PlayerProfile,
    advance_level,
    apply_action,
    begin_level,
    new_session,
    progress_report,
    retry_level,
    tick,
)
from .generator import (
    Corpus,
    LevelConfig,
    bundled_corpus,
    default_level_configs,
    generate_bank,
    generate_worm,
    mutate,
    validate_corpus,
)
from .model import (
    DetectionReport,
    EmailAddress,
    EmailMessage,
    Evidence,
    GroundTruth,
    PhishingConcept,
    Url,
    Worm,
    concept_catalog,
)
from .parsing import ParseError, parse_email, parse_url, registrable_domain

__version__ = "0.1.0"
