import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { DataLayer, indexCatalog, parseCatalog, type FetchJson } from "../src/data";
import type { Catalog } from "../src/types";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function readFixture(relative: string): unknown {
  return JSON.parse(readFileSync(join(FIXTURES, relative), "utf-8"));
}

export interface FixtureFetch {
  fetchJson: FetchJson;
  calls: string[];
}

/** Serves the golden fixture like a static web server would. */
export function fixtureFetch(): FixtureFetch {
  const calls: string[] = [];
  const fetchJson: FetchJson = (url) => {
    calls.push(url);
    const relative = url.replace(/^catalog\//, "");
    try {
      return Promise.resolve(readFixture(relative));
    } catch {
      return Promise.reject(new Error(`404 ${url}`));
    }
  };
  return { fetchJson, calls };
}

export function goldenCatalog(): Catalog {
  return indexCatalog(parseCatalog(readFixture("catalog.json")));
}

export function goldenDataLayer(): { data: DataLayer; calls: string[] } {
  const { fetchJson, calls } = fixtureFetch();
  return { data: new DataLayer(fetchJson, "catalog"), calls };
}
