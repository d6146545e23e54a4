/** World-to-screen transform with pan and zoom. World y grows upward. */

export class Camera {
  pxPerMeter = 80;
  centerX = 0;
  centerY = 0;
  private viewW = 800;
  private viewH = 600;

  resize(width: number, height: number): void {
    this.viewW = width;
    this.viewH = height;
  }

  /** Fit a world rectangle with a small margin. */
  fit(worldW: number, worldH: number): void {
    const margin = 1.08;
    this.pxPerMeter = Math.min(this.viewW / (worldW * margin),
                               this.viewH / (worldH * margin));
    this.centerX = worldW / 2;
    this.centerY = worldH / 2;
  }

  toScreen(x: number, y: number): [number, number] {
    return [
      this.viewW / 2 + (x - this.centerX) * this.pxPerMeter,
      this.viewH / 2 - (y - this.centerY) * this.pxPerMeter,
    ];
  }

  scale(meters: number): number {
    return meters * this.pxPerMeter;
  }

  pan(dxPx: number, dyPx: number): void {
    this.centerX -= dxPx / this.pxPerMeter;
    this.centerY += dyPx / this.pxPerMeter;
  }

  zoom(factor: number): void {
    this.pxPerMeter = Math.min(1000, Math.max(5, this.pxPerMeter * factor));
  }
}
