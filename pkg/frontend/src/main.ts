/** Browser entry point: loads the served map and wires the explorer UI. */

import { AtlasClient } from "./api.js";
import { SelectionController, type PanelState } from "./controller.js";
import { computeScene, communityColor, hitTest, screenToWorld } from "./scene.js";
import { applyEvent, initialView, type ViewEvent, type ViewState } from "./state.js";
import { drawScene } from "./render.js";
import { MapIndex, MapSchemaError, type MapData } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showBanner(message: string): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message;
  banner.classList.remove("hidden");
}

function toast(message: string): void {
  const box = el<HTMLDivElement>("toast");
  box.textContent = message;
  box.classList.remove("hidden");
  window.setTimeout(() => box.classList.add("hidden"), 2500);
}

class Explorer {
  private view: ViewState = initialView();
  private readonly index: MapIndex;
  private readonly controller: SelectionController;
  private readonly canvas = el<HTMLCanvasElement>("map-canvas");
  private readonly ctx = this.canvas.getContext("2d")!;
  private dirty = true;

  constructor(
    private readonly map: MapData,
    private readonly client: AtlasClient,
  ) {
    this.index = new MapIndex(map);
    this.controller = new SelectionController(client, (panel) => this.renderPanel(panel));
    this.wireCanvas();
    this.wireSearch();
    this.wireFilter();
    this.renderMeta();
    const loop = () => {
      if (this.dirty) {
        this.dirty = false;
        this.draw();
      }
      window.requestAnimationFrame(loop);
    };
    window.requestAnimationFrame(loop);
  }

  private dispatch(ev: ViewEvent): void {
    const { view, warning } = applyEvent(this.map, this.view, ev);
    this.view = view;
    if (warning) toast(warning);
    this.dirty = true;
  }

  private viewport() {
    return { width: this.canvas.width, height: this.canvas.height };
  }

  private draw(): void {
    const scene = computeScene(this.map, this.view, this.viewport());
    drawScene(this.ctx, scene, this.canvas.width, this.canvas.height);
  }

  private select(id: string | null, recenter = false): void {
    this.dispatch({ type: "select", id, recenter });
    void this.controller.select(id);
  }

  private wireCanvas(): void {
    const resize = () => {
      this.canvas.width = this.canvas.clientWidth;
      this.canvas.height = this.canvas.clientHeight;
      this.dirty = true;
    };
    window.addEventListener("resize", resize);
    resize();

    let dragging = false;
    let moved = false;
    let last = { x: 0, y: 0 };
    this.canvas.addEventListener("mousedown", (e) => {
      dragging = true;
      moved = false;
      last = { x: e.offsetX, y: e.offsetY };
    });
    window.addEventListener("mouseup", () => {
      dragging = false;
    });
    this.canvas.addEventListener("mousemove", (e) => {
      if (!dragging) return;
      const before = screenToWorld(this.view, this.viewport(), last.x, last.y);
      const after = screenToWorld(this.view, this.viewport(), e.offsetX, e.offsetY);
      last = { x: e.offsetX, y: e.offsetY };
      if (Math.abs(after.x - before.x) + Math.abs(after.y - before.y) > 0) moved = true;
      this.dispatch({ type: "pan", dx: before.x - after.x, dy: before.y - after.y });
    });
    this.canvas.addEventListener("click", (e) => {
      if (moved) return;
      const scene = computeScene(this.map, this.view, this.viewport());
      this.select(hitTest(scene, e.offsetX, e.offsetY));
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const factor = Math.pow(1.0015, -e.deltaY);
      const world = screenToWorld(this.view, this.viewport(), e.offsetX, e.offsetY);
      this.dispatch({ type: "zoom", factor, cx: world.x, cy: world.y });
    });
  }

  private wireSearch(): void {
    const input = el<HTMLInputElement>("search");
    const results = el<HTMLUListElement>("search-results");
    input.addEventListener("input", () => {
      const query = input.value.trim();
      this.dispatch({ type: "search", query });
      if (!query) {
        results.replaceChildren();
        return;
      }
      void this.client.search(query, 8).then((hits) => {
        if (input.value.trim() !== query) return; // stale
        results.replaceChildren(
          ...hits.map((hit) => {
            const item = document.createElement("li");
            item.textContent = hit.label;
            item.style.borderLeftColor = communityColor(hit.community);
            item.addEventListener("click", () => {
              this.select(hit.id, true);
              results.replaceChildren();
              input.value = "";
            });
            return item;
          }),
        );
      });
    });
  }

  private wireFilter(): void {
    const select = el<HTMLSelectElement>("community-filter");
    const all = document.createElement("option");
    all.value = "";
    all.textContent = "all communities";
    select.append(all);
    const sorted = [...this.index.communities.entries()].sort((a, b) => a[0] - b[0]);
    for (const [community, members] of sorted) {
      const option = document.createElement("option");
      option.value = String(community);
      option.textContent = `community ${community} (${members.length})`;
      select.append(option);
    }
    select.addEventListener("change", () => {
      const community = select.value === "" ? null : Number(select.value);
      this.dispatch({ type: "filter", community });
    });
  }

  private renderMeta(): void {
    const meta = el<HTMLDivElement>("meta");
    const m = this.map.meta;
    meta.textContent =
      `${this.map.nodes.length} forums, ${this.map.edges.length} edges, ` +
      `${m.communities} communities, alpha ${m.alpha}, Q ${m.q.toFixed(3)}`;
  }

  private renderPanel(panel: PanelState): void {
    const title = el<HTMLDivElement>("panel-title");
    const list = el<HTMLUListElement>("recommendations");
    const status = el<HTMLDivElement>("panel-status");
    list.replaceChildren();
    status.replaceChildren();
    if (panel.kind === "idle") {
      title.textContent = "click a forum";
      return;
    }
    const node = this.index.byId.get(panel.forum);
    title.textContent = node ? node.label : panel.forum;
    if (panel.kind === "loading") {
      status.textContent = "loading recommendations...";
      return;
    }
    if (panel.kind === "error") {
      status.textContent = `failed: ${panel.message} `;
      const retry = document.createElement("button");
      retry.textContent = "retry";
      retry.addEventListener("click", () => void this.controller.retry());
      status.append(retry);
      return;
    }
    if (panel.recommendations.length === 0) {
      status.textContent = "no same-community forums";
      return;
    }
    for (const rec of panel.recommendations) {
      const item = document.createElement("li");
      const name = document.createElement("span");
      name.textContent = rec.forum;
      const tag = document.createElement("em");
      tag.textContent = rec.relation;
      item.append(name, tag);
      // The feedback loop: clicking a recommendation recenters and selects.
      item.addEventListener("click", () => this.select(rec.forum, true));
      list.append(item);
    }
  }
}

async function boot(): Promise<void> {
  const client = new AtlasClient("");
  try {
    const map = await client.map();
    new Explorer(map, client);
  } catch (err) {
    if (err instanceof MapSchemaError) {
      showBanner(`map rejected: ${err.message}`);
    } else {
      showBanner(`could not load map: ${err instanceof Error ? err.message : err}`);
    }
  }
}

void boot();
