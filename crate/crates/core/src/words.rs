//! Built-in word list for synthetic corpus generation.

/// Common English words used as the default dictionary for synthetic titles.
pub const BASIC_WORDS: &[&str] = &[
    "about", "above", "across", "action", "advance", "adventure", "after", "again", "against",
    "algorithm", "almost", "alone", "along", "already", "although", "always", "america", "among",
    "analysis", "ancient", "angel", "animal", "another", "answer", "anything", "applied",
    "approach", "architecture", "around", "arrival", "article", "artist", "aspect", "atlas",
    "autumn", "balance", "ballad", "banner", "basic", "battle", "beauty", "because", "become",
    "before", "begin", "behind", "being", "belief", "below", "beneath", "better", "between",
    "beyond", "biology", "birth", "bitter", "black", "blood", "bloom", "blue", "board", "bone",
    "border", "botany", "bottle", "boundary", "brave", "bread", "breath", "bridge", "brief",
    "bright", "bring", "broken", "brother", "brown", "build", "burden", "burning", "business",
    "butter", "cabin", "calculus", "candle", "canvas", "capital", "captain", "carbon", "career",
    "castle", "casual", "cattle", "causes", "celestial", "center", "century", "certain", "chain",
    "chamber", "chance", "change", "chaos", "chapter", "charge", "chemistry", "chief", "child",
    "children", "choice", "chronicle", "church", "circle", "citizen", "city", "civil", "claim",
    "classic", "clear", "climate", "clock", "cloud", "coast", "code", "cold", "collected",
    "college", "colonial", "color", "comet", "common", "company", "complete", "concept",
    "concert", "condition", "conduct", "confession", "conflict", "conquest", "consider",
    "constant", "contact", "contest", "context", "control", "cooking", "copper", "corner",
    "cosmos", "cottage", "cotton", "council", "country", "courage", "course", "cover", "craft",
    "creation", "creature", "crime", "crisis", "critical", "crossing", "crown", "crystal",
    "culture", "curious", "current", "curtain", "custom", "cycle", "daily", "dance", "danger",
    "daring", "darkness", "daughter", "dawn", "death", "debate", "decade", "decision", "deep",
    "defense", "degree", "delta", "demand", "depth", "desert", "design", "desire", "destiny",
    "detail", "device", "diamond", "diary", "digital", "dinner", "direct", "discovery",
    "distance", "divine", "doctor", "doctrine", "domain", "double", "doubt", "dragon", "drama",
    "dream", "drive", "during", "dust", "duty", "dynamic", "eagle", "early", "earth", "east",
    "echo", "eclipse", "economy", "edge", "edition", "education", "effect", "eight", "either",
    "electric", "element", "elegy", "emerald", "empire", "empty", "energy", "engine", "england",
    "enough", "enterprise", "equal", "equation", "escape", "essay", "essential", "estate",
    "eternal", "ethics", "europe", "evening", "event", "every", "evidence", "exact", "example",
    "exchange", "exile", "expect", "experiment", "expert", "explore", "express", "fable", "face",
    "factor", "factory", "faith", "fallen", "family", "famous", "fantasy", "farewell", "farm",
    "father", "fauna", "fear", "feast", "feature", "federal", "feeling", "fellow", "festival",
    "fever", "fiction", "field", "fifth", "fight", "figure", "final", "finance", "finding",
    "fire", "first", "fiscal", "five", "flame", "flight", "flood", "flora", "flower", "focus",
    "follow", "food", "forbidden", "force", "foreign", "forest", "forever", "forget", "form",
    "formula", "fortune", "forward", "found", "foundation", "fountain", "four", "fragment",
    "frame", "freedom", "french", "fresh", "friend", "front", "frontier", "frozen", "fruit",
    "function", "future", "galaxy", "garden", "gate", "gather", "general", "genesis", "gentle",
    "geography", "geometry", "ghost", "giant", "gift", "girl", "glass", "global", "glory",
    "gold", "golden", "good", "gospel", "gothic", "grace", "grammar", "grand", "granite",
    "gravity", "great", "green", "ground", "group", "growth", "guard", "guest", "guide",
    "guitar", "habit", "hammer", "handbook", "happy", "harbor", "harvest", "haunted", "head",
    "health", "heart", "heaven", "heavy", "height", "heritage", "hero", "hidden", "high",
    "hill", "history", "hollow", "holy", "home", "honest", "honor", "hope", "horizon", "horse",
    "hotel", "hour", "house", "human", "hunger", "hunter", "hydrogen", "ice", "idea", "identity",
    "image", "imperial", "index", "india", "industry", "infinite", "inside", "instant",
    "institute", "interest", "interior", "introduction", "invisible", "iron", "island", "ivory",
    "jade", "japan", "journal", "journey", "judge", "jungle", "justice", "keeper", "kind",
    "king", "kingdom", "kitchen", "knight", "knowledge", "labor", "ladder", "lady", "lake",
    "land", "language", "lantern", "large", "last", "later", "latin", "laughter", "law",
    "leader", "learning", "leaves", "legacy", "legend", "lemon", "lesson", "letter", "level",
    "liberty", "library", "life", "light", "lightning", "limit", "linear", "lion", "liquid",
    "literature", "little", "living", "local", "logic", "london", "lonely", "long", "lost",
    "love", "lunar", "machine", "madness", "magic", "magnetic", "major", "making", "mammal",
    "manner", "manual", "marble", "margin", "marine", "market", "master", "material", "matrix",
    "matter", "meaning", "measure", "mechanic", "medal", "medicine", "meeting", "melody",
    "member", "memory", "mental", "merchant", "metal", "method", "middle", "midnight", "might",
    "silent", "silver", "simple", "singer", "single", "sister", "sketch", "slow", "small",
    "smoke", "snow", "social", "society", "solar", "soldier", "solid", "solution", "song",
    "sorrow", "soul", "sound", "source", "south", "space", "speak", "special", "spectrum",
    "speech", "speed", "spell", "spider", "spirit", "splendid", "sport", "spring", "square",
    "stable", "staff", "stage", "stand", "star", "state", "station", "statistics", "steam",
    "steel", "stellar", "stone", "storm", "story", "strange", "stranger", "stream", "street",
    "strength", "string", "strong", "structure", "struggle", "student", "study", "style",
    "subject", "success", "sudden", "sugar", "summer", "sunset", "supper", "supply", "supreme",
    "surface", "survey", "sweet", "swift", "symbol", "symmetry", "symphony", "system", "table",
    "tactic", "tale", "talent", "target", "teacher", "technique", "temple", "tender", "tensor",
    "terminal", "terror", "texture", "theater", "theory", "thing", "third", "thirteen",
    "thought", "thousand", "three", "thunder", "tide", "tiger", "timber", "time", "title",
    "today", "token", "tomorrow", "tongue", "topic", "total", "touch", "tower", "trade",
    "tradition", "tragedy", "trail", "train", "transfer", "transform", "travel", "treasure",
    "treatise", "treaty", "tree", "trial", "triangle", "tribe", "tribute", "trick", "triumph",
    "tropic", "trouble", "trust", "truth", "turning", "twelve", "twenty", "twilight", "under",
    "union", "unique", "united", "universe", "unknown", "urban", "useful", "valley", "value",
    "vapor", "vector", "velvet", "venture", "verse", "version", "vessel", "victory", "view",
    "village", "violet", "virtue", "vision", "visit", "visual", "vital", "vivid", "voice",
    "volume", "voyage", "wagon", "walking", "wander", "warm", "water", "wave", "wealth",
    "weather", "weight", "west", "wheel", "whisper", "white", "whole", "wild", "will", "wind",
    "window", "winter", "wisdom", "witness", "wolf", "woman", "wonder", "wood", "word", "work",
    "world", "worth", "writing", "yellow", "yield", "young", "zero", "zone",
];
