import { LabelApi } from "./api.js";
import { ConsoleController } from "./controller.js";
import { DomView } from "./view.js";

const api = new LabelApi("");
let controller: ConsoleController;
const view = new DomView(document, (label) => void controller.submit(label));
controller = new ConsoleController(api, view);
view.bindKeys(document);
controller.start();
