import { describe, expect, it } from "vitest";
import { join } from "path";
import { classCounts, loadDatasetFile, parseDataset } from "../src/dataset";

const FIXTURE = join(__dirname, "fixtures", "dataset.jsonl");

describe("parseDataset", () => {
  it("reads one sample per non-empty line", () => {
    const content = [
      '{"text": "we pack 5 boxes,", "label": 1, "source_id": "s001"}',
      "",
      '{"text": "we pack", "label": 0, "source_id": "s001"}',
    ].join("\n");
    const samples = parseDataset(content);
    expect(samples).toEqual([
      { text: "we pack 5 boxes,", label: 1, sourceId: "s001" },
      { text: "we pack", label: 0, sourceId: "s001" },
    ]);
  });

  it("reports the line number of malformed JSON", () => {
    const content = '{"text": "ok", "label": 0, "source_id": ""}\n{"text": ';
    expect(() => parseDataset(content)).toThrow(/line 2: not valid JSON/);
  });

  it("rejects labels outside 0 and 1", () => {
    expect(() => parseDataset('{"text": "x", "label": 2, "source_id": ""}')).toThrow(
      /line 1: "label" must be 0 or 1/,
    );
  });

  it("rejects non-string text", () => {
    expect(() => parseDataset('{"text": 7, "label": 1, "source_id": ""}')).toThrow(
      /line 1: "text" must be a string/,
    );
  });
});

describe("exported fixture dataset", () => {
  it("loads verbatim and is exactly balanced", () => {
    const samples = loadDatasetFile(FIXTURE);
    expect(samples.length).toBeGreaterThan(0);
    const { positives, negatives } = classCounts(samples);
    expect(positives).toBe(negatives);
    for (const sample of samples) {
      expect(sample.sourceId).toMatch(/^s\d+$/);
      expect(sample.text.length).toBeGreaterThan(0);
    }
  });
});
