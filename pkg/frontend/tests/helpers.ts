/** Shared plumbing for the DOM tests: mock installation, boot, and queries. */

import { vi } from "vitest";

import { boot } from "../src/main.js";
import { MockApi } from "./mockApi.js";

export function installMock(): MockApi {
  const mock = new MockApi();
  vi.stubGlobal("fetch", ((input: RequestInfo | URL, init?: RequestInit) =>
    mock.handle(input, init)) as typeof fetch);
  return mock;
}

/** Point the URL at `search`, mount a fresh #app and boot the application. */
export async function mount(search = ""): Promise<void> {
  history.replaceState({}, "", `/${search}`);
  document.body.innerHTML = '<div id="app"></div>';
  await boot();
  await flush();
}

/** Let queued promise chains and re-renders settle. */
export async function flush(rounds = 4): Promise<void> {
  for (let i = 0; i < rounds; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function find<T extends Element = HTMLElement>(selector: string): T {
  const el = document.querySelector<T>(selector);
  if (!el) throw new Error(`no element matches ${selector}`);
  return el;
}

export function findAll(selector: string): Element[] {
  return [...document.querySelectorAll(selector)];
}

export function textOf(selector: string): string {
  return find(selector).textContent?.trim().replace(/\s+/g, " ") ?? "";
}

export function click(selector: string): void {
  (find(selector) as HTMLElement).click();
}
