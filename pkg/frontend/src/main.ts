// Browser bootstrap: connect to the service named in config.json, mirror
// the stream onto the canvas, and wire pointer/menu/panel interactions.

import { Camera } from './camera.js';
import { ServiceClient } from './client.js';
import { DragController } from './drag.js';
import { MENU_LABELS, MenuButtonId, MenuModel } from './menu.js';
import { PanelState } from './panel.js';
import { buildScene, pickNode } from './scene.js';
import { drawHoverTitle, drawScene } from './render_canvas.js';

interface AppConfig {
  serviceUrl: string;
  seedIds?: string[];
  topic?: string;
  sessionId?: string;
}

async function boot(): Promise<void> {
  const config = (await (await fetch('config.json')).json()) as AppConfig;
  const canvas = document.getElementById('scene') as HTMLCanvasElement;
  const ctx = canvas.getContext('2d')!;
  const banner = document.getElementById('banner')!;
  const menuBox = document.getElementById('menu')!;
  const panelBox = document.getElementById('panel')!;

  const client = new ServiceClient(
    { serviceUrl: config.serviceUrl },
    (url, init) => fetch(url, init),
    (url) => {
      const ws = new WebSocket(url);
      const wrapper = {
        onmessage: null as ((data: string) => void) | null,
        onclose: null as (() => void) | null,
        close: () => ws.close(),
      };
      ws.onmessage = (ev) => wrapper.onmessage?.(ev.data as string);
      ws.onclose = () => wrapper.onclose?.();
      return wrapper;
    });

  const camera = new Camera();
  const menu = new MenuModel(client.mirror);
  const panel = new PanelState(client.mirror);
  const drag = new DragController(camera, client.mirror,
                                  (command, modality) => {
                                    client.send(command, modality)
                                      .catch(() => { drag.cancel(); });
                                  });

  if (config.sessionId) {
    await client.attach(config.sessionId);
  } else {
    await client.createSession(config.seedIds ?? [],
                               config.topic ?? 'exploration');
    client.subscribe();
  }

  let selection: string[] = [];
  let hoverTitle: string | null = null;
  let hoverAt: [number, number] = [0, 0];

  function resize(): void {
    canvas.width = window.innerWidth;
    canvas.height = window.innerHeight;
    camera.width = canvas.width;
    camera.height = canvas.height;
  }
  window.addEventListener('resize', resize);
  resize();

  function frame(): void {
    const scene = buildScene(client.mirror, camera);
    drawScene(ctx, scene, canvas.width, canvas.height);
    if (hoverTitle) drawHoverTitle(ctx, hoverTitle, hoverAt[0], hoverAt[1]);
    banner.style.display = client.disconnected ? 'block' : 'none';
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);

  function renderMenu(): void {
    menuBox.replaceChildren();
    for (const id of Object.keys(MENU_LABELS) as MenuButtonId[]) {
      const button = document.createElement('button');
      button.textContent = MENU_LABELS[id];
      button.disabled = !menu.enabled(id);
      button.onclick = () => {
        const command = menu.command(id);
        if (command) void client.send(command, 'menu');
      };
      menuBox.appendChild(button);
    }
    const kInput = document.createElement('input');
    kInput.type = 'number';
    kInput.value = String(menu.k);
    kInput.min = '1';
    kInput.title = 'result budget k';
    kInput.onchange = () => { menu.k = Number(kInput.value) || 5; };
    menuBox.appendChild(kInput);
  }

  function renderPanel(): void {
    const content = panel.content();
    panelBox.replaceChildren();
    if (!content) { panelBox.style.display = 'none'; return; }
    panelBox.style.display = 'block';
    const title = document.createElement('h3');
    title.textContent = content.title;
    const meta = document.createElement('p');
    meta.textContent = [content.authors.join(', '),
                        content.venue, content.year]
      .filter(Boolean).join(' — ');
    const abstract = document.createElement('p');
    abstract.textContent = content.abstract;
    panelBox.append(title, meta, abstract);

    const tldrButton = document.createElement('button');
    tldrButton.textContent = 'TLDR';
    tldrButton.onclick = async () => {
      const command = panel.tldrCommand();
      if (!command) return;
      const result = await client.send(command, 'menu');
      panel.acceptInsights(content.paperId,
                           { tldr: String(result.tldr ?? '') });
      renderPanel();
    };
    const kwButton = document.createElement('button');
    kwButton.textContent = 'Keywords';
    kwButton.onclick = async () => {
      const command = panel.keywordsCommand();
      if (!command) return;
      const result = await client.send(command, 'menu');
      panel.acceptInsights(content.paperId,
                           { keywords: (result.keywords ?? []) as string[] });
      renderPanel();
    };
    panelBox.append(tldrButton, kwButton);
    if (content.tldr) {
      const tldr = document.createElement('p');
      tldr.textContent = content.tldr;
      panelBox.appendChild(tldr);
    }
    if (content.keywords.length) {
      const kw = document.createElement('p');
      kw.textContent = content.keywords.join(', ');
      panelBox.appendChild(kw);
    }
    const list = document.createElement('ul');
    for (const text of content.annotations) {
      const item = document.createElement('li');
      item.textContent = text;
      list.appendChild(item);
    }
    const entry = document.createElement('input');
    entry.placeholder = 'annotate…';
    entry.onkeydown = (ev) => {
      if (ev.key === 'Enter') {
        const command = panel.annotateCommand(entry.value);
        if (command) {
          void client.send(command, 'menu');
          entry.value = '';
        }
      }
    };
    panelBox.append(list, entry);
  }

  client.onChange = () => {
    if (client.disconnected && drag.active) drag.cancel();
    renderMenu();
  };

  let shiftHeld = false;

  canvas.addEventListener('pointerdown', (ev) => {
    shiftHeld = ev.shiftKey;
    const scene = buildScene(client.mirror, camera);
    const hit = pickNode(scene, ev.offsetX, ev.offsetY);
    if (hit) {
      drag.begin(hit.id, ev.offsetX, ev.offsetY);
    } else {
      panel.close();
      renderPanel();
      orbiting = [ev.offsetX, ev.offsetY];
    }
  });

  let orbiting: [number, number] | null = null;

  canvas.addEventListener('pointermove', (ev) => {
    if (drag.active) {
      drag.move(ev.offsetX, ev.offsetY);
      return;
    }
    if (orbiting) {
      camera.orbit(ev.offsetX - orbiting[0], ev.offsetY - orbiting[1]);
      orbiting = [ev.offsetX, ev.offsetY];
      return;
    }
    const scene = buildScene(client.mirror, camera);
    const hit = pickNode(scene, ev.offsetX, ev.offsetY);
    hoverTitle = panel.hover(hit ? hit.id : null);
    hoverAt = [ev.offsetX, ev.offsetY];
  });

  canvas.addEventListener('pointerup', () => {
    orbiting = null;
    if (!drag.active) return;
    const outcome = drag.release();
    if (outcome.kind === 'selected') {
      // shift-click extends the selection for thematic bridge requests
      selection = shiftHeld && !selection.includes(outcome.nodeId)
        ? [...selection, outcome.nodeId]
        : [outcome.nodeId];
      menu.setSelection(selection);
      panel.open(outcome.nodeId);
      renderPanel();
      renderMenu();
    }
  });

  canvas.addEventListener('wheel', (ev) => {
    if (drag.active) {
      drag.adjustDepth(ev.deltaY * 0.05);
    } else {
      camera.zoom(ev.deltaY * 0.001);
    }
    ev.preventDefault();
  });

  renderMenu();
}

void boot();
