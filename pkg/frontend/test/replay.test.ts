// Full-guidance replay of a recorded 50-summary pipeline: the server already
// executed the steps, so the client replays without posting anything.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { Api } from "../src/api.js";
import { SessionController } from "../src/app.js";
import type { SessionView } from "../src/types.js";
import { MockFetch } from "./mockFetch.js";

const full = JSON.parse(
  readFileSync(new URL("./fixtures/create_full_t50.json", import.meta.url), "utf-8"),
) as SessionView;

async function fullSession(mock: MockFetch): Promise<SessionController> {
  mock.expect("POST", "/sessions", full);
  const controller = new SessionController(new Api("", mock.fetch));
  await controller.create({ dataset: "demo", mode: "full", strategy: "random", k: 5, t: 50 });
  return controller;
}

describe("full-guidance replay", () => {
  it("completes with timeline length 50", async () => {
    const mock = new MockFetch();
    const controller = await fullSession(mock);
    expect(controller.replay?.records.length).toBe(50);
    controller.replayAll();
    expect(controller.timeline.length).toBe(50);
    expect(controller.replayComplete).toBe(true);
    const html = controller.render();
    expect(html).toContain(`data-length="50"`);
    expect(html).toContain(`class="timeline complete"`);
  });

  it("posts no steps during replay", async () => {
    const mock = new MockFetch();
    const controller = await fullSession(mock);
    const postsAfterCreate = mock.postCount();
    controller.replayAll();
    expect(mock.postCount()).toBe(postsAfterCreate);
  });

  it("pause halts the playhead; resume finishes", async () => {
    const controller = await fullSession(new MockFetch());
    controller.startReplay();
    for (let i = 0; i < 20; i++) controller.replayTick();
    controller.pauseReplay();
    expect(controller.replayTick()).toBe(false);
    expect(controller.timeline.length).toBe(20);
    const paused = controller.render();
    expect(paused).toContain(`data-control="resume"`);
    expect(paused).toContain("20/50");
    controller.startReplay();
    while (controller.replayTick()) { /* run out */ }
    expect(controller.timeline.length).toBe(50);
  });

  it("feeds the charts from consumed records only", async () => {
    const controller = await fullSession(new MockFetch());
    controller.startReplay();
    for (let i = 0; i < 10; i++) controller.replayTick();
    const html = controller.render();
    const components = html.match(/data-title="utility components per step"/);
    expect(components).not.toBeNull();
    // cumulated utility values come straight from the API records
    expect(html).toContain(`data-series="cumulated utility"`);
    expect(html).toMatchSnapshot();
  });
});
