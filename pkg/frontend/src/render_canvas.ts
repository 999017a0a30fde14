// Canvas2D backend: draws a SceneDescription with painter ordering and
// radial-shaded discs standing in for spheres. Runs only in the browser;
// everything it draws comes from the testable scene module.

import { SceneDescription } from './scene.js';

const BACKGROUND = '#14141c';

export function drawScene(ctx: CanvasRenderingContext2D,
                          scene: SceneDescription,
                          width: number, height: number): void {
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, width, height);

  ctx.lineWidth = 1.2;
  ctx.globalAlpha = 0.75;
  for (const line of scene.lines) {
    ctx.strokeStyle = line.color;
    ctx.beginPath();
    ctx.moveTo(line.x1, line.y1);
    ctx.lineTo(line.x2, line.y2);
    ctx.stroke();
  }
  ctx.globalAlpha = 1;

  for (const sphere of scene.spheres) {
    const r = Math.max(1.5, sphere.radius);
    const shade = ctx.createRadialGradient(
      sphere.x - r / 3, sphere.y - r / 3, r / 6, sphere.x, sphere.y, r);
    shade.addColorStop(0, '#ffffff');
    shade.addColorStop(0.25, sphere.color);
    shade.addColorStop(1, '#000000');
    ctx.fillStyle = shade;
    ctx.beginPath();
    ctx.arc(sphere.x, sphere.y, r, 0, Math.PI * 2);
    ctx.fill();
    if (sphere.outline) {
      ctx.strokeStyle = sphere.outline;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(sphere.x, sphere.y, r + 1.5, 0, Math.PI * 2);
      ctx.stroke();
    }
  }

  ctx.font = '14px sans-serif';
  ctx.textAlign = 'center';
  ctx.fillStyle = '#f2f2f2';
  for (const label of scene.labels) {
    ctx.fillText(label.text, label.x, label.y);
  }

  if (scene.topic) {
    ctx.textAlign = 'left';
    ctx.fillStyle = '#9aa0b0';
    ctx.fillText(scene.topic, 12, height - 14);
  }
}

export function drawHoverTitle(ctx: CanvasRenderingContext2D, title: string,
                               x: number, y: number): void {
  ctx.font = '13px sans-serif';
  const width = ctx.measureText(title).width + 12;
  ctx.fillStyle = 'rgba(20, 20, 28, 0.9)';
  ctx.fillRect(x - width / 2, y - 34, width, 20);
  ctx.fillStyle = '#ffffff';
  ctx.textAlign = 'center';
  ctx.fillText(title, x, y - 20);
}
