/**
 * Feature extraction for the prefix-completeness classifier.
 *
 * A prefix is truncated to its trailing `maxInputLen` whitespace tokens,
 * mirroring the input-length cap of the consumer, then hashed into a
 * fixed-size sparse bag: one bucket per normalized token, position-tagged
 * buckets for the last few raw tokens (where punctuation carries the
 * signal), and indicator buckets for how the prefix ends.
 */

export const FEATURE_DIM = 4096;
export const FEATURE_VERSION = "hashed-tail-bow-v1";

const TAIL_POSITIONS = 4;
const PUNCTUATION = new Set([",", ";", ":", ".", "!", "?"]);

export function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((token) => token.length > 0);
}

export function truncateTokens(tokens: string[], maxInputLen: number): string[] {
  return tokens.length > maxInputLen
    ? tokens.slice(tokens.length - maxInputLen)
    : tokens;
}

/** 32-bit FNV-1a, reduced to a bucket index; stable across processes. */
export function hashFeature(name: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < name.length; i++) {
    hash ^= name.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return (hash >>> 0) % FEATURE_DIM;
}

function normalize(token: string): string {
  return token
    .replace(/^[,;:.!?'"()[\]]+|[,;:.!?'"()[\]]+$/g, "")
    .toLowerCase();
}

export function featurize(text: string, maxInputLen: number): Map<number, number> {
  const features = new Map<number, number>();
  const add = (name: string) => {
    const index = hashFeature(name);
    features.set(index, (features.get(index) ?? 0) + 1);
  };

  const tokens = truncateTokens(tokenize(text), maxInputLen);
  if (tokens.length === 0) {
    add("empty");
    return features;
  }
  for (const token of tokens) add(`bow:${normalize(token)}`);
  for (let k = 1; k <= Math.min(TAIL_POSITIONS, tokens.length); k++) {
    add(`tail${k}:${tokens[tokens.length - k].toLowerCase()}`);
  }
  const last = tokens[tokens.length - 1];
  const lastChar = last[last.length - 1];
  add(PUNCTUATION.has(lastChar) ? `end:${lastChar}` : "end:word");
  if (last.endsWith("...")) add("end:ellipsis");
  add(`len:${Math.min(6, Math.floor(Math.log2(tokens.length + 1)))}`);
  return features;
}
