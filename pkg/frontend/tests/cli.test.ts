import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it, vi } from "vitest";
import { main } from "../src/cli.js";

const fixturesDir = join(__dirname, "fixtures");
const outDir = mkdtempSync(join(tmpdir(), "figures-"));

afterEach(() => {
  vi.restoreAllMocks();
});

describe("render command", () => {
  it("renders every figure kind from the aggregate CSVs", () => {
    const cases: Array<[string, string, number]> = [
      ["convergence", "convergence_agg.csv", 1],
      ["sweep_m", "elements_agg.csv", 5],
      ["sweep_power", "power_agg.csv", 3],
      ["deployment", "deployment_agg.csv", 2],
    ];
    for (const [kind, fixture, schemes] of cases) {
      const out = join(outDir, `${kind}.svg`);
      const rc = main([
        "render", "--kind", kind, "--in", join(fixturesDir, fixture), "--out", out,
      ]);
      expect(rc).toBe(0);
      expect(existsSync(out)).toBe(true);
      const svg = readFileSync(out, "utf8");
      expect((svg.match(/<polyline /g) ?? []).length).toBe(schemes);
    }
  });

  it("rejects input with a missing column and lists the expected header", () => {
    const bad = join(outDir, "bad.csv");
    writeFileSync(bad, "scheme,sweep_value,mean_rate,n\nproposed,20,28.8,50\n");
    const errors: string[] = [];
    vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
    const rc = main(["render", "--kind", "sweep_m", "--in", bad, "--out", join(outDir, "bad.svg")]);
    expect(rc).toBe(1);
    expect(errors.join("\n")).toContain("scheme, sweep_value, mean_rate, stderr, n");
  });

  it("rejects an empty CSV", () => {
    const empty = join(outDir, "empty.csv");
    writeFileSync(empty, "scheme,sweep_value,mean_rate,stderr,n\n");
    vi.spyOn(console, "error").mockImplementation(() => {});
    const rc = main(["render", "--kind", "sweep_m", "--in", empty, "--out", join(outDir, "e.svg")]);
    expect(rc).toBe(1);
  });

  it("rejects unknown kinds and incomplete flags", () => {
    vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["render", "--kind", "pie", "--in", "x.csv", "--out", "x.svg"])).toBe(2);
    expect(main(["render", "--kind", "sweep_m"])).toBe(2);
    expect(main(["render", "--kind", "sweep_m", "--in", "a.csv", "--out", "a.svg", "--loud", "1"])).toBe(2);
  });

  it("does not mutate its input and re-renders identically", () => {
    const input = join(fixturesDir, "deployment_agg.csv");
    const before = readFileSync(input);
    const first = join(outDir, "dep1.svg");
    const second = join(outDir, "dep2.svg");
    vi.spyOn(console, "log").mockImplementation(() => {});
    expect(main(["render", "--kind", "deployment", "--in", input, "--out", first])).toBe(0);
    expect(main(["render", "--kind", "deployment", "--in", input, "--out", second])).toBe(0);
    expect(readFileSync(input)).toEqual(before);
    expect(readFileSync(first, "utf8")).toBe(readFileSync(second, "utf8"));
  });

  it("runs as a standalone executable", () => {
    const out = join(outDir, "exec.svg");
    const stdout = execFileSync(
      "node",
      [join(__dirname, "..", "dist", "cli.js"),
       "render", "--kind", "sweep_power",
       "--in", join(fixturesDir, "power_agg.csv"), "--out", out],
      { encoding: "utf8" },
    );
    expect(stdout).toContain(`wrote ${out}`);
    expect(existsSync(out)).toBe(true);
  });
});
