import { ApiClient, ApiError } from "./api.js";
import { layoutTree, type ViewNode } from "./layout.js";
import { branchFill } from "./palette.js";
import { isNodeRecord, type NodeRecord } from "./types.js";

const DRAG_THRESHOLD = 6;

interface DragState {
  nodeId: string;
  startX: number;
  startY: number;
  moved: boolean;
}

/**
 * DOM scene for one map. The server is the single source of truth: every
 * structural change round-trips and the scene re-renders from the last tree
 * the server returned. Only collapse toggling is optimistic (presentation
 * only) and reverts if the server rejects it.
 */
export class MapView {
  readonly toolbar: HTMLElement;
  readonly undoButton: HTMLButtonElement;
  readonly redoButton: HTMLButtonElement;
  readonly viewport: HTMLElement;
  readonly world: HTMLElement;
  readonly edgeLayer: SVGSVGElement;
  readonly nodeLayer: HTMLElement;
  readonly menu: HTMLElement;
  readonly toastRegion: HTMLElement;
  readonly banner: HTMLElement;

  private tree: NodeRecord | null = null;
  private positions = new Map<string, ViewNode>();
  private mapId: string | null = null;
  private selectedId: string | null = null;
  private busyNodes = new Set<string>();
  private undoCount = 0;
  private redoCount = 0;

  private scale = 1;
  private panX = 40;
  private panY = 40;
  private drag: DragState | null = null;
  private panning: { startX: number; startY: number } | null = null;
  private hoveredId: string | null = null;

  constructor(
    readonly container: HTMLElement,
    readonly client: ApiClient,
  ) {
    container.classList.add("mindmap");
    container.innerHTML = "";

    this.toolbar = el("div", "toolbar");
    this.undoButton = button("Undo", () => void this.undo());
    this.redoButton = button("Redo", () => void this.redo());
    this.toolbar.append(this.undoButton, this.redoButton);

    this.banner = el("div", "error-banner");
    this.viewport = el("div", "viewport");
    this.world = el("div", "world");
    this.edgeLayer = document.createElementNS(
      "http://www.w3.org/2000/svg",
      "svg",
    );
    this.edgeLayer.classList.add("edges");
    this.nodeLayer = el("div", "nodes");
    this.world.append(this.edgeLayer, this.nodeLayer);
    this.viewport.append(this.world);
    this.menu = el("div", "context-menu");
    this.menu.style.display = "none";
    this.toastRegion = el("div", "toasts");
    container.append(
      this.toolbar,
      this.banner,
      this.viewport,
      this.menu,
      this.toastRegion,
    );

    this.wireViewportEvents();
    this.updateToolbar();
  }

  // --- state -----------------------------------------------------------------

  openMap(mapId: string, tree: NodeRecord): void {
    this.mapId = mapId;
    this.undoCount = 0;
    this.redoCount = 0;
    this.setTree(tree);
    this.updateToolbar();
  }

  /** Replace the scene with a server-returned tree. */
  setTree(tree: unknown): void {
    if (!isNodeRecord(tree)) {
      this.showBanner("Malformed map payload from server.");
      return;
    }
    this.hideBanner();
    this.tree = tree;
    this.positions = layoutTree(tree);
    this.render();
  }

  currentTree(): NodeRecord | null {
    return this.tree;
  }

  viewNode(nodeId: string): ViewNode | undefined {
    return this.positions.get(nodeId);
  }

  isUndoEnabled(): boolean {
    return !this.undoButton.disabled;
  }

  isRedoEnabled(): boolean {
    return !this.redoButton.disabled;
  }

  // --- rendering ---------------------------------------------------------------

  private render(): void {
    this.nodeLayer.innerHTML = "";
    this.edgeLayer.innerHTML = "";
    if (!this.tree) return;

    for (const view of this.positions.values()) {
      if (view.parentId !== null) {
        const parent = this.positions.get(view.parentId)!;
        const edge = document.createElementNS(
          "http://www.w3.org/2000/svg",
          "line",
        );
        edge.classList.add("edge");
        edge.setAttribute("x1", String(parent.x + 120));
        edge.setAttribute("y1", String(parent.y + 16));
        edge.setAttribute("x2", String(view.x));
        edge.setAttribute("y2", String(view.y + 16));
        edge.dataset.from = view.parentId;
        edge.dataset.to = view.record.id;
        this.edgeLayer.append(edge);
      }
      this.nodeLayer.append(this.renderNode(view));
    }
    this.applyTransform();
  }

  private renderNode(view: ViewNode): HTMLElement {
    const record = view.record;
    const node = el("div", "map-node");
    node.dataset.nodeId = record.id;
    node.dataset.colorIndex = String(record.color_index);
    const fill = branchFill(record.color_index);
    node.dataset.fill = fill;
    node.style.background = fill;
    node.style.left = `${view.x}px`;
    node.style.top = `${view.y}px`;
    if (record.id === this.selectedId) node.classList.add("selected");
    if (this.busyNodes.has(record.id)) node.classList.add("busy");

    const text = el("span", "node-text");
    text.textContent = record.text;
    node.append(text);

    if (record.collapsed && view.hiddenDescendants > 0) {
      const badge = el("span", "collapse-badge");
      badge.textContent = String(view.hiddenDescendants);
      node.append(badge);
    }

    node.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      this.openMenu(record.id, event.clientX, event.clientY);
    });
    node.addEventListener("mousedown", (event) => {
      if (event.button !== 0) return;
      event.stopPropagation();
      this.drag = {
        nodeId: record.id,
        startX: event.clientX,
        startY: event.clientY,
        moved: false,
      };
    });
    node.addEventListener("mouseover", () => {
      this.hoveredId = record.id;
    });
    node.addEventListener("dblclick", () => this.startInlineEdit(record.id));
    return node;
  }

  private applyTransform(): void {
    this.world.style.transform =
      `translate(${this.panX}px, ${this.panY}px) scale(${this.scale})`;
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.add("visible");
  }

  private hideBanner(): void {
    this.banner.textContent = "";
    this.banner.classList.remove("visible");
  }

  toast(message: string): void {
    const item = el("div", "toast");
    item.textContent = message;
    this.toastRegion.append(item);
    setTimeout(() => item.remove(), 4000);
  }

  private updateToolbar(): void {
    this.undoButton.disabled = this.undoCount === 0;
    this.redoButton.disabled = this.redoCount === 0;
  }

  // --- context menu ---------------------------------------------------------

  openMenu(nodeId: string, x: number, y: number): void {
    if (this.busyNodes.has(nodeId)) return;
    const record = this.findRecord(nodeId);
    if (!record) return;
    this.menu.innerHTML = "";
    this.menu.style.display = "block";
    this.menu.style.left = `${x}px`;
    this.menu.style.top = `${y}px`;
    this.menu.dataset.nodeId = nodeId;

    const items: Array<[string, string, () => void]> = [
      ["explain", "Explanation", () => void this.runExplain(nodeId)],
      ["examples", "Examples", () => void this.runExamples(nodeId)],
      ["explore", "Exploration", () => this.openQuestionForm(nodeId)],
      ["add", "Add child", () => void this.addChild(nodeId)],
      ["edit", "Edit", () => this.startInlineEdit(nodeId)],
      ["delete", "Delete", () => void this.deleteNode(nodeId)],
      [
        "collapse",
        record.collapsed ? "Expand" : "Collapse",
        () => void this.toggleCollapsed(nodeId),
      ],
    ];
    for (const [action, label, run] of items) {
      const item = button(label, () => {
        if (action !== "explore") this.closeMenu();
        run();
      });
      item.dataset.action = action;
      this.menu.append(item);
    }
  }

  closeMenu(): void {
    this.menu.style.display = "none";
    this.menu.innerHTML = "";
    delete this.menu.dataset.nodeId;
  }

  /** Exploration asks for the question inline before any request is sent. */
  private openQuestionForm(nodeId: string): void {
    this.menu.innerHTML = "";
    const input = document.createElement("input");
    input.classList.add("question-input");
    input.placeholder = "Ask about this node";
    const validation = el("span", "validation");
    const ask = button("Ask", () => {
      const question = input.value.trim();
      if (!question) {
        validation.textContent = "Question must not be empty.";
        return;
      }
      this.closeMenu();
      void this.runExplore(nodeId, question);
    });
    ask.classList.add("ask");
    this.menu.append(input, ask, validation);
  }

  // --- AI actions -------------------------------------------------------------

  private async enrich(
    nodeId: string,
    call: () => Promise<unknown>,
  ): Promise<void> {
    if (!this.mapId) return;
    this.busyNodes.add(nodeId);
    this.render();
    try {
      await call();
      const fresh = await this.client.getTree(this.mapId);
      this.undoCount += 1;
      this.redoCount = 0;
      this.busyNodes.delete(nodeId);
      this.setTree(fresh.tree);
    } catch (error) {
      this.busyNodes.delete(nodeId);
      this.render();
      this.reportError(error);
    } finally {
      this.updateToolbar();
    }
  }

  runExplain(nodeId: string): Promise<void> {
    return this.enrich(nodeId, () =>
      this.client.explain(this.mapId!, nodeId),
    );
  }

  runExamples(nodeId: string): Promise<void> {
    return this.enrich(nodeId, () =>
      this.client.examples(this.mapId!, nodeId),
    );
  }

  runExplore(nodeId: string, question: string): Promise<void> {
    return this.enrich(nodeId, () =>
      this.client.explore(this.mapId!, nodeId, question),
    );
  }

  // --- edits -----------------------------------------------------------------

  private async command(
    run: () => Promise<{ tree: NodeRecord }>,
  ): Promise<boolean> {
    try {
      const response = await run();
      this.undoCount += 1;
      this.redoCount = 0;
      this.setTree(response.tree);
      return true;
    } catch (error) {
      this.render(); // snap everything back to the last server tree
      this.reportError(error);
      return false;
    } finally {
      this.updateToolbar();
    }
  }

  addChild(nodeId: string): Promise<boolean> {
    return this.command(() =>
      this.client.applyCommand(this.mapId!, {
        type: "add_child",
        parent: nodeId,
        text: "New idea",
      }),
    );
  }

  deleteNode(nodeId: string): Promise<boolean> {
    return this.command(() =>
      this.client.applyCommand(this.mapId!, {
        type: "delete_subtree",
        node: nodeId,
      }),
    );
  }

  editText(nodeId: string, newText: string): Promise<boolean> {
    return this.command(() =>
      this.client.applyCommand(this.mapId!, {
        type: "edit_text",
        node: nodeId,
        new_text: newText,
      }),
    );
  }

  moveNode(nodeId: string, newParentId: string): Promise<boolean> {
    return this.command(() =>
      this.client.applyCommand(this.mapId!, {
        type: "move_subtree",
        node: nodeId,
        new_parent: newParentId,
      }),
    );
  }

  /** Collapse toggling renders optimistically, then confirms with the server. */
  async toggleCollapsed(nodeId: string): Promise<void> {
    const record = this.findRecord(nodeId);
    if (!record || !this.mapId) return;
    const flag = !record.collapsed;
    record.collapsed = flag;
    this.positions = layoutTree(this.tree!);
    this.render();
    try {
      const response = await this.client.applyCommand(this.mapId, {
        type: "set_collapsed",
        node: nodeId,
        flag,
      });
      this.undoCount += 1;
      this.redoCount = 0;
      this.setTree(response.tree);
    } catch (error) {
      record.collapsed = !flag;
      this.positions = layoutTree(this.tree!);
      this.render();
      this.reportError(error);
    } finally {
      this.updateToolbar();
    }
  }

  async undo(): Promise<void> {
    if (!this.mapId) return;
    try {
      const response = await this.client.undo(this.mapId);
      this.undoCount = Math.max(0, this.undoCount - 1);
      this.redoCount += 1;
      this.setTree(response.tree);
    } catch (error) {
      if (error instanceof ApiError && error.body.code === "NoHistory") {
        this.undoCount = 0;
      } else {
        this.reportError(error);
      }
    } finally {
      this.updateToolbar();
    }
  }

  async redo(): Promise<void> {
    if (!this.mapId) return;
    try {
      const response = await this.client.redo(this.mapId);
      this.redoCount = Math.max(0, this.redoCount - 1);
      this.undoCount += 1;
      this.setTree(response.tree);
    } catch (error) {
      if (error instanceof ApiError && error.body.code === "NoHistory") {
        this.redoCount = 0;
      } else {
        this.reportError(error);
      }
    } finally {
      this.updateToolbar();
    }
  }

  // --- gestures ----------------------------------------------------------------

  private wireViewportEvents(): void {
    this.viewport.addEventListener("mousedown", (event) => {
      if (event.button !== 0) return;
      this.panning = {
        startX: event.clientX - this.panX,
        startY: event.clientY - this.panY,
      };
    });
    document.addEventListener("mousemove", (event) => {
      if (this.drag) {
        const dx = event.clientX - this.drag.startX;
        const dy = event.clientY - this.drag.startY;
        if (Math.abs(dx) + Math.abs(dy) > DRAG_THRESHOLD) {
          this.drag.moved = true;
          const nodeEl = this.nodeElement(this.drag.nodeId);
          if (nodeEl) {
            nodeEl.classList.add("dragging");
            nodeEl.style.transform = `translate(${dx}px, ${dy}px)`;
          }
        }
        return;
      }
      if (this.panning) {
        this.panX = event.clientX - this.panning.startX;
        this.panY = event.clientY - this.panning.startY;
        this.applyTransform();
      }
    });
    document.addEventListener("mouseup", () => {
      this.panning = null;
      const drag = this.drag;
      this.drag = null;
      if (!drag) return;
      if (!drag.moved) {
        this.select(drag.nodeId);
        return;
      }
      const target = this.hoveredId;
      if (target && target !== drag.nodeId) {
        void this.moveNode(drag.nodeId, target);
      } else {
        this.render(); // nothing to do: snap back
      }
    });
    this.viewport.addEventListener("wheel", (event) => {
      event.preventDefault();
      const factor = event.deltaY < 0 ? 1.1 : 1 / 1.1;
      this.scale = Math.min(2.5, Math.max(0.25, this.scale * factor));
      this.applyTransform();
    });
    document.addEventListener("mousedown", (event) => {
      if (!(event.target instanceof Element)) return;
      if (!this.menu.contains(event.target)) this.closeMenu();
    });
  }

  select(nodeId: string): void {
    this.selectedId = nodeId;
    this.render();
  }

  private startInlineEdit(nodeId: string): void {
    const nodeEl = this.nodeElement(nodeId);
    const record = this.findRecord(nodeId);
    if (!nodeEl || !record) return;
    const textEl = nodeEl.querySelector(".node-text");
    if (!textEl) return;
    const input = document.createElement("input");
    input.classList.add("edit-input");
    input.value = record.text;
    textEl.replaceWith(input);
    const commit = () => {
      const value = input.value.trim();
      if (!value || value === record.text) {
        this.render();
        return;
      }
      void this.editText(nodeId, value);
    };
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") commit();
      if (event.key === "Escape") this.render();
    });
    input.addEventListener("blur", commit);
  }

  // --- helpers -------------------------------------------------------------------

  nodeElement(nodeId: string): HTMLElement | null {
    return this.nodeLayer.querySelector(`[data-node-id="${nodeId}"]`);
  }

  findRecord(nodeId: string): NodeRecord | null {
    const walk = (record: NodeRecord): NodeRecord | null => {
      if (record.id === nodeId) return record;
      for (const child of record.children) {
        const found = walk(child);
        if (found) return found;
      }
      return null;
    };
    return this.tree ? walk(this.tree) : null;
  }

  private reportError(error: unknown): void {
    if (error instanceof ApiError) {
      if (
        error.body.code === "RedundantContent" ||
        error.body.code === "NoExamples"
      ) {
        this.toast("duplicate content rejected");
      } else if (error.status === 502) {
        this.toast("The model is unavailable, try the action again.");
      } else if (error.body.code === "CycleError") {
        this.toast("Cannot move a node into its own branch.");
      } else if (error.body.code !== "NoHistory") {
        this.toast(error.body.message || "Request failed.");
      }
      return;
    }
    this.toast("Request failed.");
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.classList.add(className);
  return node;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const node = document.createElement("button");
  node.textContent = label;
  node.addEventListener("click", onClick);
  return node;
}
