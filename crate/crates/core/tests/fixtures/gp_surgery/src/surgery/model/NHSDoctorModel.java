package surgery.model;

public class NHSDoctorModel {
    private Nhspatient patient = new Nhspatient("Ann");

    public String patientName() {
        return patient.getFirstName();
    }
}
