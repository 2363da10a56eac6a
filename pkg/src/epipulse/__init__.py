"""epipulse: epidemic event extraction and early-warning analytics."""

from .ontology import EventType, OntologySpec, Tier, load_ontology
from .preprocess import CleanPost, RawPost, normalize_post, split_hashtag, tokenize
from .embed import BuiltinHashEmbedder, RemoteEmbedder, cosine, embed_texts
from .filtering import FilterTag, filter_corpus, keyword_frequency, tag_post
from .sampling import SamplingPlan, draw_sample
from .detect import EventMention, PredictionSet, TriggerSpan, detect_external, detect_keyword
from .evaluate import EvalReport, GoldCorpus, KappaReport, event_coverage, fleiss_kappa, score
from .monitor import (
    DiseaseProfile,
    EventTimeSeries,
    WarningRule,
    WarningSignal,
    aggregate_daily,
    detect_warnings,
    disease_profile,
    rolling_mean,
)

__version__ = "0.1.0"
