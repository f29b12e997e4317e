package surgery.controller;

import surgery.model.NHSDoctorModel;
import surgery.other.RoleController;
import surgery.view.nhsdoctor.NHSDoctorViewMain;

public class NHSDoctorController implements RoleController {
    private NHSDoctorModel model;
    private NHSDoctorViewMain view;

    public NHSDoctorController() {
        model = new NHSDoctorModel();
        view = new NHSDoctorViewMain(this);
    }

    public void start() {
        view.show(model.patientName());
    }
}
